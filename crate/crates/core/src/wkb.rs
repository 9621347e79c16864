//! Total potential of a smooth barrier from the semiclassical
//! wavefunction, with Airy patches at the two turning points.
//!
//! With x0 < a the turning points (V increasing through x0, decreasing
//! through a), S(x) = ∫ₓᵃ|p|, Θ = S(x0) and a unit transmitted flux, the
//! connection formulas give
//!
//! ```text
//! x > a        ψ = p^{-1/2} exp[i(∫ₐˣ p + π/4)]
//! x0 < x < a   ψ = |p|^{-1/2} [e^{S} + (i/2) e^{-S}]
//! x < x0       ψ = p^{-1/2} [2e^{Θ} sin φ + (i/2) e^{-Θ} cos φ],  φ = ∫ₓ^{x0} p + π/4
//! ```
//!
//! Near each turning point ψ is replaced by the exact solution of the
//! linearised problem, √π κ^{-1/2} times Bi + iAi (right) or
//! 2e^{Θ}Ai + (i/2)e^{-Θ}Bi (left), which carries the same flux.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::model::{PhysicalParams, SmoothPotential};
use crate::quad::{linspace, tanh_sinh, GaussLegendre};
use crate::scalar::{cplx, lit, to_f64, Real};
use crate::specfun::{airy, gamma_real};

const ROOT_SCAN: usize = 4000;
const ROOT_TOL: f64 = 1e-12;
const WINDOW_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurningPoints<T> {
    /// x0, where V rises through E.
    pub left: T,
    /// a, where V falls through E.
    pub right: T,
    pub left_slope: T,
    pub right_slope: T,
}

impl<T: Real> TurningPoints<T> {
    pub fn width(&self) -> T {
        self.right - self.left
    }
}

/// Roots of V(x) = E in `bracket`, which must enclose exactly one barrier.
pub fn find_turning_points<T: Real>(
    potential: &SmoothPotential<T>,
    energy: T,
    bracket: (T, T),
) -> Result<TurningPoints<T>> {
    let (lo, hi) = bracket;
    if !(lo < hi) {
        return Err(Error::InvalidParameter("turning-point bracket must satisfy lo < hi".into()));
    }
    let g = |x: T| potential.value(x) - energy;
    let scale = energy.abs().max(T::one());
    let xs = linspace(lo, hi, ROOT_SCAN + 1);
    let gs: Vec<T> = xs.iter().map(|&x| g(x)).collect();

    // tangencies: interior extrema of V sitting on E
    let ds: Vec<T> = xs.iter().map(|&x| potential.derivative(x)).collect();
    for i in 0..ROOT_SCAN {
        if ds[i] == T::zero() || ds[i] * ds[i + 1] < T::zero() {
            let xe = if ds[i] == T::zero() { xs[i] } else { bisect(|x| potential.derivative(x), xs[i], xs[i + 1], ds[i]) };
            if g(xe).abs() <= lit::<T>(1e-10) * scale {
                return Err(Error::DegenerateTurningPoint { x: to_f64(xe) });
            }
        }
    }

    let mut roots: Vec<T> = Vec::new();
    for i in 0..=ROOT_SCAN {
        if gs[i] == T::zero() {
            roots.push(xs[i]);
        } else if i < ROOT_SCAN && gs[i + 1] != T::zero() && gs[i] * gs[i + 1] < T::zero() {
            let r = bisect(g, xs[i], xs[i + 1], gs[i]);
            roots.push(newton(potential, energy, r, xs[i], xs[i + 1]));
        }
    }
    if roots.len() != 2 {
        return Err(Error::Topology(format!(
            "expected exactly two turning points in [{}, {}], found {}",
            to_f64(lo),
            to_f64(hi),
            roots.len()
        )));
    }
    let (left, right) = (roots[0], roots[1]);
    let (left_slope, right_slope) = (potential.derivative(left), potential.derivative(right));
    for (x, s) in [(left, left_slope), (right, right_slope)] {
        if s.abs() <= lit::<T>(1e-10) * scale {
            return Err(Error::DegenerateTurningPoint { x: to_f64(x) });
        }
    }
    if !(left_slope > T::zero() && right_slope < T::zero() && g((left + right) * lit(0.5)) > T::zero()) {
        return Err(Error::Topology("the turning points do not enclose a barrier".into()));
    }
    Ok(TurningPoints { left, right, left_slope, right_slope })
}

fn bisect<T: Real>(f: impl Fn(T) -> T, mut lo: T, mut hi: T, f_lo: T) -> T {
    let positive_lo = f_lo > T::zero();
    for _ in 0..200 {
        let mid = (lo + hi) * lit(0.5);
        if mid <= lo || mid >= hi || hi - lo <= lit::<T>(ROOT_TOL) * lit(1e-2) {
            break;
        }
        if (f(mid) > T::zero()) == positive_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) * lit(0.5)
}

fn newton<T: Real>(potential: &SmoothPotential<T>, energy: T, mut x: T, lo: T, hi: T) -> T {
    for _ in 0..8 {
        let d = potential.derivative(x);
        if d == T::zero() {
            break;
        }
        let step = (potential.value(x) - energy) / d;
        let next = x - step;
        if !(next >= lo && next <= hi) {
            break;
        }
        x = next;
        if step.abs() <= lit::<T>(ROOT_TOL) {
            break;
        }
    }
    x
}

/// 3^{5/6} Γ(2/3) / (2 Γ(1/3))
pub fn rho_prefactor<T: Real>() -> Result<T> {
    let third = T::one() / lit(3.0);
    Ok(lit::<T>(3.0).powf(lit(5.0 / 6.0)) * gamma_real(third + third)? / (lit::<T>(2.0) * gamma_real(third)?))
}

/// ρ = 0.631341 ħ β^{1/3}/(M a), β = −V'(a), for the right turning point a.
pub fn rho_general<T: Real>(potential: &SmoothPotential<T>, right: T, params: &PhysicalParams<T>) -> Result<T> {
    let beta = -potential.derivative(right);
    if !(beta > T::zero()) {
        return Err(Error::Orientation(format!(
            "V'(a) must be negative at the right turning point, got {}",
            to_f64(-beta)
        )));
    }
    Ok(rho_prefactor::<T>()? * params.hbar * beta.cbrt() / (params.mass * right))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WkbOptions<T> {
    /// Patch half-width; chosen per turning point when `None`.
    pub window: Option<T>,
    /// Keep the (i/2)e^{-S} term under the barrier.
    pub include_decaying_term: bool,
    pub points: usize,
    /// Output range; defaults to [x0 − L/2, a + L/2] with L = a − x0.
    pub range: Option<(T, T)>,
}

impl<T: Real> Default for WkbOptions<T> {
    fn default() -> Self {
        Self { window: None, include_decaying_term: true, points: 2000, range: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Piece {
    Left,
    LeftPatch,
    Barrier,
    RightPatch,
    Right,
}

/// Relative jump of E − V_tot between the semiclassical and Airy forms at
/// a window edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchJump<T> {
    pub x: T,
    pub relative: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WkbProfile<T> {
    pub xs: Vec<T>,
    pub r: Vec<T>,
    pub w_prime: Vec<T>,
    pub v: Vec<T>,
    pub v_tot: Vec<T>,
    /// ħ Im(ψ*ψ')/M
    pub flux: Vec<T>,
    pub pieces: Vec<Piece>,
    pub turning_points: TurningPoints<T>,
    /// Patch half-widths at x0 and a.
    pub windows: (T, T),
    pub theta: T,
    pub patch_jumps: Vec<PatchJump<T>>,
}

impl<T: Real> WkbProfile<T> {
    pub fn kinetic(&self, energy: T) -> Vec<T> {
        self.v_tot.iter().map(|&v| energy - v).collect()
    }
}

/// Semiclassical wavefunction for a fixed barrier.
struct Semiclassical<'a, T> {
    potential: &'a SmoothPotential<T>,
    energy: T,
    params: PhysicalParams<T>,
    tp: TurningPoints<T>,
    theta: T,
    decaying: bool,
}

impl<T: Real> Semiclassical<'_, T> {
    fn p2(&self, x: T) -> T {
        let h = self.params.hbar;
        lit::<T>(2.0) * self.params.mass * (self.energy - self.potential.value(x)) / (h * h)
    }

    /// |p| and d|p|/dx
    fn abs_p(&self, x: T) -> (T, T) {
        let h = self.params.hbar;
        let p = self.p2(x).abs().sqrt();
        let sign = if self.p2(x) >= T::zero() { -T::one() } else { T::one() };
        (p, sign * self.params.mass * self.potential.derivative(x) / (h * h * p))
    }

    /// ∫|p| over [lo, hi]. Kinks in V stall the double-exponential rule,
    /// so the interval is bisected and the innermost pieces fall back to
    /// Gauss–Legendre.
    fn action(&self, lo: T, hi: T) -> Result<T> {
        self.action_split(lo, hi, 4)
    }

    fn action_split(&self, lo: T, hi: T, depth: usize) -> Result<T> {
        let f = |x: T| self.p2(x).abs().sqrt();
        match tanh_sinh(|x, _, _| f(x), lo, hi, lit(1e-12)) {
            Err(Error::Precision(_)) if depth > 0 => {
                let mid = (lo + hi) * lit(0.5);
                Ok(self.action_split(lo, mid, depth - 1)? + self.action_split(mid, hi, depth - 1)?)
            }
            Err(Error::Precision(_)) => Ok(GaussLegendre::new(20).integrate_composite(f, lo, hi, 8)),
            other => other,
        }
    }

    fn kappa(&self, slope: T) -> T {
        let h = self.params.hbar;
        (lit::<T>(2.0) * self.params.mass * slope.abs() / (h * h)).cbrt()
    }

    /// F(x) = ∫_{x0}^x |p| (negative for x < x0).
    fn from_left(&self, x: T) -> Result<T> {
        let x0 = self.tp.left;
        if x >= x0 {
            self.action(x0, x)
        } else {
            Ok(-self.action(x, x0)?)
        }
    }

    /// ψ and ψ' of one piece, given F(x) from [`from_left`](Self::from_left).
    fn psi(&self, piece: Piece, x: T, f: T) -> (Complex<T>, Complex<T>) {
        let half = lit::<T>(0.5);
        let decay_coef = if self.decaying { half } else { T::zero() };
        let (x0, a) = (self.tp.left, self.tp.right);
        match piece {
            Piece::Right => {
                let (p, dp) = self.abs_p(x);
                let phase = f - self.theta + T::FRAC_PI_4();
                let psi = cplx(T::zero(), phase).exp() / p.sqrt();
                (psi, psi * cplx(-half * dp / p, p))
            }
            Piece::Barrier => {
                let (p, dp) = self.abs_p(x);
                let s = self.theta - f;
                let (g, d) = (s.exp(), (-s).exp());
                let amp = cplx(g, decay_coef * d);
                let slope = cplx(-g, decay_coef * d) * p;
                let root = p.sqrt();
                (amp / root, -amp * (half * dp / (p * root)) + slope / root)
            }
            Piece::Left => {
                let (p, dp) = self.abs_p(x);
                let phi = T::FRAC_PI_4() - f;
                let big = lit::<T>(2.0) * self.theta.exp();
                let small = half * (-self.theta).exp();
                let (sn, cs) = (phi.sin(), phi.cos());
                let amp = cplx(big * sn, small * cs);
                let d_amp = cplx(big * cs, -small * sn) * (-p);
                let root = p.sqrt();
                (amp / root, -amp * (half * dp / (p * root)) + d_amp / root)
            }
            Piece::RightPatch => {
                let k = self.kappa(self.tp.right_slope);
                let v = airy(k * (a - x));
                let c = (T::PI() / k).sqrt();
                let im = if self.decaying { T::one() } else { T::zero() };
                (cplx(v.bi, im * v.ai) * c, cplx(v.bi_prime, im * v.ai_prime) * (-k * c))
            }
            Piece::LeftPatch => {
                let k = self.kappa(self.tp.left_slope);
                let v = airy(k * (x - x0));
                let c = (T::PI() / k).sqrt();
                let big = lit::<T>(2.0) * self.theta.exp();
                let small = decay_coef * (-self.theta).exp();
                (cplx(big * v.ai, small * v.bi) * c, cplx(big * v.ai_prime, small * v.bi_prime) * (k * c))
            }
        }
    }

    /// F at every point of a sorted grid, accumulated segment by segment
    /// with the turning points inserted as nodes.
    fn from_left_on_grid(&self, xs: &[T]) -> Result<Vec<T>> {
        let (x0, a) = (self.tp.left, self.tp.right);
        let mut nodes: Vec<T> = xs.to_vec();
        nodes.push(x0);
        nodes.push(a);
        nodes.sort_by(|p, q| p.partial_cmp(q).unwrap());
        nodes.dedup();
        let start = nodes.iter().position(|&x| x == x0).unwrap();
        let mut f = vec![T::zero(); nodes.len()];
        for i in start + 1..nodes.len() {
            f[i] = f[i - 1] + self.action(nodes[i - 1], nodes[i])?;
        }
        for i in (0..start).rev() {
            f[i] = f[i + 1] - self.action(nodes[i], nodes[i + 1])?;
        }
        Ok(xs
            .iter()
            .map(|x| {
                let i = nodes.binary_search_by(|n| n.partial_cmp(x).unwrap()).unwrap();
                f[i]
            })
            .collect())
    }

    fn piece_at(&self, x: T, w0: T, wa: T) -> Piece {
        let (x0, a) = (self.tp.left, self.tp.right);
        if x < x0 - w0 {
            Piece::Left
        } else if x <= x0 + w0 {
            Piece::LeftPatch
        } else if x < a - wa {
            Piece::Barrier
        } else if x <= a + wa {
            Piece::RightPatch
        } else {
            Piece::Right
        }
    }

    /// E − V_tot = (ħ²/2M)(J/|ψ|²)² with J = Im(ψ*ψ').
    fn kinetic(&self, psi: Complex<T>, dpsi: Complex<T>) -> T {
        let w = self.params.hbar * (psi.conj() * dpsi).im / psi.norm_sqr();
        w * w / (lit::<T>(2.0) * self.params.mass)
    }
}

/// Largest half-width w ≤ `cap` with |V(x₀±w) − E − V'(x₀)(±w)| < 0.05|V'(x₀)|w.
fn auto_window<T: Real>(potential: &SmoothPotential<T>, energy: T, x: T, slope: T, cap: T) -> T {
    let ok = |w: T| {
        [w, -w].iter().all(|&d| {
            let err = (potential.value(x + d) - energy - slope * d).abs();
            err < lit::<T>(WINDOW_FRACTION) * slope.abs() * w
        })
    };
    if ok(cap) {
        return cap;
    }
    let (mut lo, mut hi) = (T::zero(), cap);
    for _ in 0..60 {
        let mid = (lo + hi) * lit(0.5);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Total-potential profile of the patched semiclassical wavefunction for
/// a barrier whose turning points lie in `bracket`.
pub fn wkb_total_potential<T: Real>(
    potential: &SmoothPotential<T>,
    params: &PhysicalParams<T>,
    bracket: (T, T),
    opts: &WkbOptions<T>,
) -> Result<WkbProfile<T>> {
    let energy = params.energy;
    let tp = find_turning_points(potential, energy, bracket)?;
    let width = tp.width();
    let (w0, wa) = match opts.window {
        Some(w) => {
            if !(w > T::zero()) {
                return Err(Error::InvalidParameter("patch window must be positive".into()));
            }
            (w, w)
        }
        None => {
            let cap = width * lit(0.5);
            (
                auto_window(potential, energy, tp.left, tp.left_slope, cap),
                auto_window(potential, energy, tp.right, tp.right_slope, cap),
            )
        }
    };
    if w0 + wa >= width {
        return Err(Error::ThinBarrier { width: to_f64(width), left: to_f64(w0), right: to_f64(wa) });
    }
    if !(w0 > T::zero() && wa > T::zero()) {
        return Err(Error::DegenerateTurningPoint { x: to_f64(if w0 > T::zero() { tp.right } else { tp.left }) });
    }

    let mut sc = Semiclassical { potential, energy, params: *params, tp, theta: T::zero(), decaying: opts.include_decaying_term };
    let theta = sc.action(tp.left, tp.right)?;
    let limit = T::max_value().ln() * lit(0.24);
    if theta > limit {
        return Err(Error::Precision(format!(
            "barrier action {} exceeds the representable limit {}",
            to_f64(theta),
            to_f64(limit)
        )));
    }
    sc.theta = theta;

    let (lo, hi) = opts.range.unwrap_or((tp.left - width * lit(0.5), tp.right + width * lit(0.5)));
    if opts.points < 2 || !(lo < hi) {
        return Err(Error::InvalidParameter("WKB grid needs at least 2 points and lo < hi".into()));
    }
    let xs = linspace(lo, hi, opts.points);
    let n = xs.len();
    let (mut r, mut w_prime, mut v, mut v_tot, mut flux, mut pieces) =
        (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    let (hbar, mass) = (params.hbar, params.mass);
    let fs = sc.from_left_on_grid(&xs)?;
    for (&x, &f) in xs.iter().zip(&fs) {
        let piece = sc.piece_at(x, w0, wa);
        let (psi, dpsi) = sc.psi(piece, x, f);
        let j = (psi.conj() * dpsi).im;
        r.push(psi.norm());
        w_prime.push(hbar * j / psi.norm_sqr());
        v.push(potential.value(x));
        v_tot.push(energy - sc.kinetic(psi, dpsi));
        flux.push(hbar * j / mass);
        pieces.push(piece);
    }

    let edges = [
        (tp.left - w0, Piece::Left, Piece::LeftPatch),
        (tp.left + w0, Piece::Barrier, Piece::LeftPatch),
        (tp.right - wa, Piece::Barrier, Piece::RightPatch),
        (tp.right + wa, Piece::Right, Piece::RightPatch),
    ];
    let mut patch_jumps = Vec::with_capacity(4);
    for (x, outer, inner) in edges {
        let f = sc.from_left(x)?;
        let (a, da) = sc.psi(outer, x, f);
        let (b, db) = sc.psi(inner, x, f);
        let (ka, kb) = (sc.kinetic(a, da), sc.kinetic(b, db));
        let scale = ka.abs().max(kb.abs());
        let relative = if scale > T::zero() { (ka - kb).abs() / scale } else { T::zero() };
        patch_jumps.push(PatchJump { x, relative });
    }

    Ok(WkbProfile {
        xs,
        r,
        w_prime,
        v,
        v_tot,
        flux,
        pieces,
        turning_points: tp,
        windows: (w0, wa),
        theta,
        patch_jumps,
    })
}
