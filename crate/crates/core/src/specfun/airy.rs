//! Airy functions Ai, Bi and their derivatives on the real line.
//!
//! Maclaurin series on |x| ≤ 5 and asymptotic expansions for |x| > 9. In
//! between, values are carried by Taylor steps of the Airy equation from
//! the asymptotic anchor at |x| = 9, where the expansions are accurate to
//! machine precision; the optimally truncated expansions alone are only
//! good to ~1e-7 at |x| = 5. On the positive side only Ai needs this (the
//! Bi series has no cancellation and is used up to x = 12).

use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, to_f64, Real};

const AI0: f64 = 0.355_028_053_887_817_239_26;
const AIP0: f64 = -0.258_819_403_792_806_798_41;
const SQRT3: f64 = 1.732_050_807_568_877_293_5;

const MACLAURIN_EDGE: f64 = 5.0;
const ASYMPTOTIC_EDGE: f64 = 9.0;
const MACLAURIN_BI_EDGE: f64 = 12.0;
const TAYLOR_STEP: f64 = 0.5;

/// Supported range of [`airy_ai`].
pub const AIRY_AI_RANGE: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryValues<T> {
    pub ai: T,
    pub ai_prime: T,
    pub bi: T,
    pub bi_prime: T,
}

/// Ai(x) for |x| ≤ 30.
pub fn airy_ai<T: Real>(x: T) -> Result<T> {
    if !(x.abs() <= lit(AIRY_AI_RANGE)) {
        return Err(Error::Domain(format!("airy_ai supports |x| <= {AIRY_AI_RANGE}, got {}", to_f64(x))));
    }
    Ok(airy(x).ai)
}

/// All four Airy values at `x`.
pub fn airy<T: Real>(x: T) -> AiryValues<T> {
    let edge = lit::<T>(MACLAURIN_EDGE);
    let far = lit::<T>(ASYMPTOTIC_EDGE);
    if x.abs() <= edge {
        return maclaurin(x);
    }
    if x < T::zero() {
        if x < -far {
            return asymptotic_negative(-x);
        }
        let anchor = asymptotic_negative(far);
        let (ai, ai_prime) = taylor_walk(-far, anchor.ai, anchor.ai_prime, x);
        let (bi, bi_prime) = taylor_walk(-far, anchor.bi, anchor.bi_prime, x);
        return AiryValues { ai, ai_prime, bi, bi_prime };
    }
    let (ai, ai_prime) = if x > far {
        asymptotic_ai_positive(x)
    } else {
        let (a, ap) = asymptotic_ai_positive(far);
        taylor_walk(far, a, ap, x)
    };
    let (bi, bi_prime) = if x <= lit(MACLAURIN_BI_EDGE) {
        let m = maclaurin(x);
        (m.bi, m.bi_prime)
    } else {
        asymptotic_bi_positive(x)
    };
    AiryValues { ai, ai_prime, bi, bi_prime }
}

/// Carries (y, y') of a solution of y'' = x·y from `x0` to `x1` by Taylor
/// steps of at most 0.5.
fn taylor_walk<T: Real>(x0: T, y0: T, dy0: T, x1: T) -> (T, T) {
    let max_step = lit::<T>(TAYLOR_STEP);
    let n = ((x1 - x0).abs() / max_step).ceil().to_usize().unwrap_or(1).max(1);
    let h = (x1 - x0) / from_usize(n);
    let (mut x, mut y, mut dy) = (x0, y0, dy0);
    for _ in 0..n {
        let (ny, ndy) = taylor_step(x, y, dy, h);
        x = x + h;
        y = ny;
        dy = ndy;
    }
    (y, dy)
}

fn taylor_step<T: Real>(x0: T, y: T, dy: T, h: T) -> (T, T) {
    // c_{n+2} (n+2)(n+1) = x0 c_n + c_{n-1}
    let mut c_prev2 = T::zero(); // c_{n-1}
    let mut c_prev = y; // c_n, n = 0
    let mut c_cur = dy; // c_{n+1}
    let mut value = y + dy * h;
    let mut slope = dy;
    let mut hp = h; // h^{n+1}
    let mut hp_d = T::one(); // h^{n}
    for n in 0..80usize {
        let nf = from_usize::<T>(n);
        let c_next = (x0 * c_prev + c_prev2) / ((nf + lit(2.0)) * (nf + T::one()));
        hp_d = hp_d * h;
        hp = hp * h;
        let tv = c_next * hp;
        let td = c_next * (nf + lit(2.0)) * hp_d;
        value = value + tv;
        slope = slope + td;
        c_prev2 = c_prev;
        c_prev = c_cur;
        c_cur = c_next;
        if n > 4 && tv.abs() <= T::epsilon() * value.abs() * lit(1e-2) && td.abs() <= T::epsilon() * slope.abs() * lit(1e-2) {
            break;
        }
    }
    (value, slope)
}

fn maclaurin<T: Real>(x: T) -> AiryValues<T> {
    // f = Σ a_k x^{3k}, g = Σ b_k x^{3k+1}, with Ai = c1 f + c2 g,
    // Bi = √3 (c1 f − c2 g), c1 = Ai(0), c2 = Ai'(0).
    let x3 = x * x * x;
    let eps = T::epsilon() * lit(0.25);
    let mut f = T::one();
    let mut g = x;
    let mut fp = T::zero();
    let mut gp = T::one();
    let mut tf = T::one();
    let mut tg = x;
    let mut tfp = x * x * lit(0.5);
    let mut tgp = T::one();
    fp = fp + tfp;
    let mut scale = T::one().max(x.abs());
    for k in 0..200usize {
        let kf = from_usize::<T>(k);
        let three_k = kf * lit(3.0);
        tf = tf * x3 / ((three_k + lit(2.0)) * (three_k + lit(3.0)));
        tg = tg * x3 / ((three_k + lit(3.0)) * (three_k + lit(4.0)));
        tgp = tgp * x3 / ((three_k + T::one()) * (three_k + lit(3.0)));
        f = f + tf;
        g = g + tg;
        gp = gp + tgp;
        if k >= 1 {
            tfp = tfp * x3 / (three_k * (three_k + lit(2.0)));
            fp = fp + tfp;
        }
        scale = scale.max(tf.abs()).max(tg.abs());
        let largest = tf.abs().max(tg.abs()).max(tfp.abs()).max(tgp.abs());
        if k >= 2 && largest <= eps * scale.min(T::one()) {
            break;
        }
    }
    let c1 = lit::<T>(AI0);
    let c2 = lit::<T>(AIP0);
    let s3 = lit::<T>(SQRT3);
    AiryValues {
        ai: c1 * f + c2 * g,
        ai_prime: c1 * fp + c2 * gp,
        bi: s3 * (c1 * f - c2 * g),
        bi_prime: s3 * (c1 * fp - c2 * gp),
    }
}

/// Coefficients u_k, v_k of the standard asymptotic expansions.
fn asymptotic_coefficients<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    let mut u = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    let mut uk = T::one();
    u.push(uk);
    v.push(T::one());
    for k in 1..n {
        let kf = from_usize::<T>(k);
        let six_k = kf * lit(6.0);
        uk = uk * (six_k - lit(5.0)) * (six_k - lit(3.0)) * (six_k - T::one())
            / (lit::<T>(216.0) * kf * (kf + kf - T::one()));
        u.push(uk);
        v.push(-uk * (six_k + T::one()) / (six_k - T::one()));
    }
    (u, v)
}

/// Σ sign^k c_k ζ^{-k}, truncated at the smallest term.
fn truncated_sum<T: Real>(c: &[T], inv_zeta: T, alternate: bool) -> T {
    let mut sum = T::zero();
    let mut pow = T::one();
    let mut prev = T::infinity();
    for (k, &ck) in c.iter().enumerate() {
        let term = ck * pow;
        if term.abs() > prev {
            break;
        }
        prev = term.abs();
        sum = if alternate && k % 2 == 1 { sum - term } else { sum + term };
        if term.abs() <= T::epsilon() * sum.abs() * lit(0.1) {
            break;
        }
        pow = pow * inv_zeta;
    }
    sum
}

fn asymptotic_ai_positive<T: Real>(x: T) -> (T, T) {
    let (u, v) = asymptotic_coefficients::<T>(40);
    let zeta = lit::<T>(2.0 / 3.0) * x * x.sqrt();
    let q = x.sqrt().sqrt();
    let pre = (-zeta).exp() / (lit::<T>(2.0) * T::PI().sqrt());
    let ai = pre / q * truncated_sum(&u, zeta.recip(), true);
    let aip = -pre * q * truncated_sum(&v, zeta.recip(), true);
    (ai, aip)
}

fn asymptotic_bi_positive<T: Real>(x: T) -> (T, T) {
    let (u, v) = asymptotic_coefficients::<T>(40);
    let zeta = lit::<T>(2.0 / 3.0) * x * x.sqrt();
    let q = x.sqrt().sqrt();
    let pre = zeta.exp() / T::PI().sqrt();
    let bi = pre / q * truncated_sum(&u, zeta.recip(), false);
    let bip = pre * q * truncated_sum(&v, zeta.recip(), false);
    (bi, bip)
}

/// Oscillatory expansions for Ai(−z), Bi(−z), z > 0.
fn asymptotic_negative<T: Real>(z: T) -> AiryValues<T> {
    let (u, v) = asymptotic_coefficients::<T>(40);
    let zeta = lit::<T>(2.0 / 3.0) * z * z.sqrt();
    let inv = zeta.recip();
    let inv2 = inv * inv;
    let split = |c: &[T]| -> (T, T) {
        let even: Vec<T> = c.iter().step_by(2).copied().collect();
        let odd: Vec<T> = c.iter().skip(1).step_by(2).copied().collect();
        (truncated_sum(&even, inv2, true), truncated_sum(&odd, inv2, true) * inv)
    };
    let (pu, qu) = split(&u);
    let (pv, qv) = split(&v);
    let phase = zeta + T::FRAC_PI_4();
    let (s, c) = phase.sin_cos();
    let q = z.sqrt().sqrt();
    let rsp = T::PI().sqrt().recip();
    AiryValues {
        ai: rsp / q * (s * pu - c * qu),
        bi: rsp / q * (c * pu + s * qu),
        ai_prime: -rsp * q * (c * pv + s * qv),
        bi_prime: rsp * q * (s * pv - c * qv),
    }
}
