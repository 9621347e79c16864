//! One function per scenario, each producing a [`Table`].

use rayon::prelude::*;

use qtunnel_core::backreaction::{backreaction_profile, modified_probability, q_from_state, shifted_probability, state_at};
use qtunnel_core::env::{evolve_gaussian, vacuum_start, TanhBackground};
use qtunnel_core::model::{PhysicalParams, RectBarrier, SmoothPotential};
use qtunnel_core::quad::linspace;
use qtunnel_core::rect::{potential_profile, rolling_time, solve_rect, transmission_probability, RectSolution};
use qtunnel_core::wkb::{rho_general, wkb_total_potential, WkbOptions};
use qtunnel_core::{Error, Result};

use crate::config::{RunConfig, Scenario};
use crate::output::{fmt_num, Table};

pub fn run(cfg: &RunConfig) -> Result<Table> {
    match cfg.scenario {
        Scenario::Fig1a | Scenario::Fig1b => rect_profile(cfg),
        Scenario::Fig2 | Scenario::Wkb => wkb(cfg),
        Scenario::Fig3 => fig3(cfg),
        Scenario::Rect => rect(cfg),
        Scenario::ModeEvolve => mode_evolve(cfg),
        Scenario::Backreaction => backreaction(cfg),
        Scenario::Sweep => sweep(cfg),
    }
}

fn solution(cfg: &RunConfig) -> Result<RectSolution<f64>> {
    solve_rect(&cfg.params(), &cfg.barrier())
}

fn rect_profile(cfg: &RunConfig) -> Result<Table> {
    let sol = solution(cfg)?;
    let a = cfg.width;
    let (lo, hi) = match cfg.scenario {
        Scenario::Fig1a => (0.0, a),
        _ => (-2.0 * a, 3.0 * a),
    };
    let xs = linspace(cfg.x_min.unwrap_or(lo), cfg.x_max.unwrap_or(hi), cfg.points.unwrap_or(401));
    let prof = potential_profile(&sol, &xs);
    let mut t = Table::new(&["x", "V", "V_tot", "E"]);
    for i in 0..xs.len() {
        t.push(vec![xs[i], prof.v[i], prof.v_tot[i], cfg.energy]);
    }
    t.note("P", transmission_probability(&sol).value());
    Ok(t)
}

fn wkb(cfg: &RunConfig) -> Result<Table> {
    let potential = SmoothPotential::polynomial(&cfg.potential);
    let params = cfg.params();
    let range = match (cfg.x_min, cfg.x_max) {
        (Some(lo), Some(hi)) => Some((lo, hi)),
        (None, None) => None,
        _ => return Err(Error::InvalidParameter("x-min and x-max must be given together for WKB output".into())),
    };
    let opts = WkbOptions {
        window: cfg.window,
        include_decaying_term: cfg.decaying_term,
        points: cfg.points.unwrap_or(2000),
        range,
    };
    let prof = wkb_total_potential(&potential, &params, cfg.bracket, &opts)?;
    let mut t = Table::new(&["x", "V", "V_tot", "E", "R", "W_prime", "flux"]);
    for i in 0..prof.xs.len() {
        t.push(vec![prof.xs[i], prof.v[i], prof.v_tot[i], cfg.energy, prof.r[i], prof.w_prime[i], prof.flux[i]]);
    }
    let tp = prof.turning_points;
    t.note("x0", tp.left);
    t.note("a", tp.right);
    t.note("theta", prof.theta);
    t.note("window_left", prof.windows.0);
    t.note("window_right", prof.windows.1);
    t.note("rho", rho_general(&potential, tp.right, &params)?);
    let worst = prof.patch_jumps.iter().map(|j| j.relative).fold(0.0, f64::max);
    t.note("max_patch_jump", worst);
    Ok(t)
}

fn fig3(cfg: &RunConfig) -> Result<Table> {
    let sol = solution(cfg)?;
    let prof = backreaction_profile(&sol, &cfg.modes, cfg.points.unwrap_or(2000))?;
    let mut t = Table::new(&["x", "V", "V_eff", "Q1", "Q2"]);
    for i in 0..prof.xs.len() {
        t.push(vec![prof.xs[i], prof.v[i], prof.v_eff[i], prof.q1[i], prof.q2[i]]);
    }
    t.note("delta_v_bar", prof.delta_v_bar);
    t.note("delta_v_mid", prof.delta_v_mid);
    Ok(t)
}

fn rect(cfg: &RunConfig) -> Result<Table> {
    let sol = solution(cfg)?;
    let tr = transmission_probability(&sol);
    let mut t = Table::new(&[
        "P", "P_amplitude", "t_roll", "k", "beta", "A_re", "A_im", "B_re", "B_im", "F_re", "F_im", "G_re", "G_im",
        "C_re", "C_im",
    ]);
    let c = [sol.incident, sol.reflected, sol.decaying, sol.growing, sol.transmitted];
    let mut row = vec![tr.closed_form, tr.amplitude_ratio, rolling_time(&sol), sol.k, sol.beta];
    row.extend(c.iter().flat_map(|z| [z.re, z.im]));
    t.push(row);
    t.note("relative_mismatch", tr.relative_mismatch());
    Ok(t)
}

fn background(cfg: &RunConfig, sol: &RectSolution<f64>) -> Result<TanhBackground<f64>> {
    match cfg.rho {
        Some(rho) => TanhBackground::new(cfg.width, rho),
        None => Ok(sol.tanh_background()),
    }
}

fn mode_evolve(cfg: &RunConfig) -> Result<Table> {
    let sol = solution(cfg)?;
    let bg = background(cfg, &sol)?;
    let span = 10.0 / bg.rho;
    let (lo, hi) = (cfg.t_min.unwrap_or(-span), cfg.t_max.unwrap_or(span));
    let start = bg.vacuum_start();
    if lo < start {
        return Err(Error::Domain(format!("t-min {lo} precedes the vacuum start {start}")));
    }
    let ts = linspace(lo, hi, cfg.points.unwrap_or(401));
    let mut t = Table::new(&[
        "mode", "t", "x_bar", "omega", "alpha_sq_ode", "beta_ode", "alpha_sq_xi", "beta_xi", "Q1", "Q2",
    ]);
    for (idx, mode) in cfg.modes.iter().enumerate() {
        let ode = evolve_gaussian(mode, &bg, &vacuum_start(mode, &bg), &ts)?;
        for (s, &time) in ode.iter().zip(&ts) {
            let xi = state_at(mode, &bg, time)?;
            let (q1, q2) = q_from_state(mode, &bg, &xi)?;
            let x = bg.position(time);
            t.push(vec![
                (idx + 1) as f64,
                time,
                x,
                mode.omega_sq_at(x).sqrt(),
                s.alpha_sq(),
                s.beta,
                xi.alpha_sq(),
                xi.beta,
                q1,
                q2,
            ]);
        }
    }
    t.note("rho", bg.rho);
    Ok(t)
}

fn backreaction(cfg: &RunConfig) -> Result<Table> {
    let sol = solution(cfg)?;
    let prof = backreaction_profile(&sol, &cfg.modes, cfg.points.unwrap_or(2000))?;
    let mut t = Table::new(&["x", "V", "V_eff", "delta_V", "Q1", "Q2", "p0"]);
    for i in 0..prof.xs.len() {
        t.push(vec![prof.xs[i], prof.v[i], prof.v_eff[i], prof.delta_v[i], prof.q1[i], prof.q2[i], prof.p0[i]]);
    }
    t.note("delta_v_bar", prof.delta_v_bar);
    t.note("delta_v_mid", prof.delta_v_mid);
    t.note("P0", transmission_probability(&sol).value());
    t.note("P_exact_shifted", shifted_probability(&sol, prof.delta_v_bar)?);
    match modified_probability(&sol, prof.delta_v_bar) {
        Ok(p) => t.note("P_modified", p),
        Err(Error::OutOfRegime { exponent, .. }) => {
            t.note_text("P_modified", format!("out-of-regime(exponent={})", fmt_num(exponent)))
        }
        Err(e) => return Err(e),
    }
    if prof.trimmed {
        t.note_text("trimmed", "true");
    }
    Ok(t)
}

fn sweep(cfg: &RunConfig) -> Result<Table> {
    let rows: Vec<Result<Vec<f64>>> = cfg
        .sweep_values
        .par_iter()
        .map(|&value| {
            let (mut hbar, mut mass, mut energy, mut v0, mut width) = (cfg.hbar, cfg.mass, cfg.energy, cfg.v0, cfg.width);
            match cfg.sweep_key.as_str() {
                "hbar" => hbar = value,
                "mass" => mass = value,
                "energy" => energy = value,
                "v0" => v0 = value,
                _ => width = value,
            }
            let sol = solve_rect(&PhysicalParams::new(hbar, mass, energy)?, &RectBarrier::new(v0, width)?)?;
            let p = transmission_probability(&sol).value();
            let tr = rolling_time(&sol);
            Ok(vec![value, p, tr, p * tr])
        })
        .collect();
    let mut t = Table::new(&["value", "P", "t_roll", "P_t_roll"]);
    for r in rows {
        t.push(r?);
    }
    t.note_text("sweep_key", cfg.sweep_key.clone());
    Ok(t)
}
