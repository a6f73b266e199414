use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use magcap_core::analysis::{self, default_transient, escape_witness, first_return, DEFAULT_RETURN_THRESHOLD};
use magcap_core::capacity::{self, capacity_value};
use magcap_core::dynamics::{self, HamiltonianKind, MagneticSystem, PhaseState, PhaseVec};
use magcap_core::verify::{self, Suite, VerifyOptions};
use magcap_core::Error as CoreError;

use crate::args::{AreaArgs, CapacityArgs, Common, Kind, ManeArgs, SimulateArgs, SweepArgs, SweepParam, VerifyArgs, COMMON_KEYS};
use crate::config::{required, ConfigFile};
use crate::error::{CliError, CliResult};
use crate::output::{emit, sig17, trajectory_csv};

const DEFAULT_TOL: f64 = 1e-10;

/// Common flags merged with the config file.
struct Base {
    cfg: ConfigFile,
    kappa: Option<f64>,
    s: Option<f64>,
    r: Option<f64>,
    tol: f64,
    out: Option<PathBuf>,
    json: bool,
}

impl Base {
    fn load(c: &Common, extra: &[&str]) -> CliResult<Self> {
        let allowed: Vec<&str> = COMMON_KEYS.iter().chain(extra).copied().collect();
        let cfg = ConfigFile::load(c.config.as_deref(), &allowed)?;
        Ok(Base {
            kappa: cfg.f64(c.kappa, "kappa")?,
            s: cfg.f64(c.s, "s")?,
            r: cfg.f64(c.r, "r")?,
            tol: cfg.f64(c.tol, "tol")?.unwrap_or(DEFAULT_TOL),
            out: cfg.path(c.out.clone(), "out")?,
            json: cfg.switch(c.json, "json")?,
            cfg,
        })
    }

    fn kappa(&self) -> CliResult<f64> {
        required(self.kappa, "kappa")
    }

    fn s(&self) -> CliResult<f64> {
        required(self.s, "s")
    }

    fn r(&self) -> CliResult<f64> {
        required(self.r, "r")
    }

    fn system(&self) -> CliResult<MagneticSystem> {
        Ok(MagneticSystem::new(self.kappa()?, self.s()?)?)
    }
}

fn json_line<T: Serialize>(v: &T) -> CliResult<String> {
    Ok(serde_json::to_string(v)? + "\n")
}

pub fn capacity(a: &CapacityArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let b = Base::load(&a.common, &["certify", "delta", "eta", "ramp-w"])?;
    let (kappa, s, r) = (b.kappa()?, b.s()?, b.r()?);
    let text = if b.cfg.switch(a.certify, "certify")? {
        let delta = b.cfg.f64(a.delta, "delta")?.unwrap_or(0.2);
        let eta = b.cfg.f64(a.eta, "eta")?.unwrap_or(0.1);
        let ramp_w = b.cfg.f64(a.ramp_w, "ramp-w")?.unwrap_or(0.1);
        let cert = capacity::capacity_certificate(kappa, s, r, delta, eta, ramp_w)?;
        if b.json {
            json_line(&cert)?
        } else {
            format!(
                "value {}\ncertified_lower_bound {}\ngap {}\nmin_period_measured {}\nlevels_checked {}\n",
                sig17(cert.value),
                sig17(cert.certified_lower_bound),
                sig17(cert.gap),
                sig17(cert.min_period_measured),
                cert.levels_checked
            )
        }
    } else {
        let res = capacity_value(kappa, s, r)?;
        if b.json {
            json_line(&res)?
        } else {
            format!("{}\n", sig17(res.value))
        }
    };
    emit(b.out.as_deref(), &text, stdout)
}

pub fn simulate(a: &SimulateArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let b = Base::load(
        &a.common,
        &["x", "y", "u", "w", "kind", "duration", "samples", "delta", "eta", "ramp-w"],
    )?;
    let sys = b.system()?;
    let c = &b.cfg;
    let st0 = sys.state(
        c.f64(a.x, "x")?.unwrap_or(0.0),
        c.f64(a.y, "y")?.unwrap_or(0.0),
        c.f64(a.u, "u")?.unwrap_or(1.0),
        c.f64(a.w, "w")?.unwrap_or(0.0),
    )?;
    let kind = match a.kind {
        Some(k) => k,
        None => match c.string(None, "kind")?.as_deref() {
            None | Some("kinetic") => Kind::Kinetic,
            Some("circle") => Kind::Circle,
            Some("profiled") => Kind::Profiled,
            Some(other) => return Err(CliError::Input(format!("unknown kind '{other}'"))),
        },
    };
    let kind = match kind {
        Kind::Kinetic => HamiltonianKind::Kinetic,
        Kind::Circle => HamiltonianKind::CircleAction,
        Kind::Profiled => {
            let max_h = capacity_value(sys.k(), sys.s, b.r()?)?.value;
            HamiltonianKind::Profiled(capacity::build_profile(
                max_h,
                c.f64(a.delta, "delta")?.unwrap_or(0.2),
                c.f64(a.eta, "eta")?.unwrap_or(0.1),
                c.f64(a.ramp_w, "ramp-w")?.unwrap_or(0.1),
            )?)
        }
    };
    let duration = match c.f64(a.duration, "duration")? {
        Some(d) => d,
        None => analysis::period_estimate(&sys, &st0, &kind).ok_or_else(|| {
            CliError::Input("no closed-form period for this state; pass --duration".into())
        })?,
    };
    let samples = c.usize(a.samples, "samples")?.unwrap_or(1000);
    if samples == 0 {
        return Err(CliError::Input("--samples must be positive".into()));
    }
    let traj = dynamics::integrate(&sys, &st0, &kind, duration, b.tol, samples)?;
    let st = &traj.stats;
    writeln!(
        stderr,
        "steps {} rejected {} max_energy_drift {} chart_swaps {}",
        st.steps,
        st.rejected_steps,
        sig17(st.max_energy_drift),
        st.chart_swaps
    )?;
    let text = if b.json {
        let rows: Vec<_> = traj
            .samples
            .iter()
            .map(|smp| {
                let p = &smp.state;
                json!({
                    "t": smp.t, "x": p.p.x, "y": p.p.y, "u": p.u, "w": p.w,
                    "chart": p.p.chart.label(),
                    "energy": dynamics::kinetic_energy(&sys, p),
                })
            })
            .collect();
        json_line(&json!({ "samples": rows, "stats": {
            "steps": st.steps, "rejected_steps": st.rejected_steps,
            "max_energy_drift": st.max_energy_drift, "chart_swaps": st.chart_swaps,
        }}))?
    } else {
        trajectory_csv(&sys, &traj)
    };
    emit(b.out.as_deref(), &text, stdout)
}

fn flipped_lorentz(sys: &MagneticSystem, st: &PhaseState) -> PhaseVec {
    let mut x = dynamics::lorentz_rhs(sys, st);
    let v2 = st.u * st.u + st.w * st.w;
    if v2 > 0.0 {
        // reverse the sign of the magnetic term only
        let es = st.p.chart.orientation() * sys.s;
        x[2] += 2.0 * es * st.w;
        x[3] -= 2.0 * es * st.u;
    }
    x
}

pub fn verify(a: &VerifyArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let suite: Suite = a.suite.parse().map_err(|e: CoreError| CliError::Input(e.to_string()))?;
    let mut opts = VerifyOptions::default();
    if a.mutate_lorentz_sign {
        opts.field = flipped_lorentz;
    }
    let results = verify::run(suite, &opts)?;
    if a.json {
        stdout.write_all(json_line(&results)?.as_bytes())?;
    } else {
        let width = results.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut table = String::new();
        for c in &results {
            writeln!(
                table,
                "{:<4} {:<9} {:<width$}  residual {:<24} threshold {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.suite,
                c.name,
                sig17(c.residual),
                sig17(c.threshold),
            )
            .expect("writing to a String");
        }
        stdout.write_all(table.as_bytes())?;
    }
    let failed: Vec<String> = results
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{}/{} residual {} > {}", c.suite, c.name, sig17(c.residual), sig17(c.threshold)))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failed.join("; ")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub value: Option<f64>,
    pub capacity_or_period: &'static str,
    pub status: &'static str,
}

fn sweep_point(param: SweepParam, x: f64, kappa: Option<f64>, s: Option<f64>, r: Option<f64>) -> CliResult<SweepRow> {
    let need = |v: Option<f64>, k: &str| required(v, k);
    let res = match param {
        SweepParam::R => capacity_value(need(kappa, "kappa")?, need(s, "s")?, x).map(|c| c.value),
        SweepParam::S => capacity_value(need(kappa, "kappa")?, x, need(r, "r")?).map(|c| c.value),
        SweepParam::Kappa => capacity_value(x, need(s, "s")?, need(r, "r")?).map(|c| c.value),
        SweepParam::Energy => {
            let sys = MagneticSystem::new(need(kappa, "kappa")?, need(s, "s")?)?;
            dynamics::period_of_energy(&sys, x)
        }
    };
    let label = if param == SweepParam::Energy { "period" } else { "capacity" };
    let row = |value, status| SweepRow { param: x, value, capacity_or_period: label, status };
    match res {
        Ok(v) => Ok(row(Some(v), "ok")),
        Err(CoreError::WeakField { .. }) => Ok(row(None, "weak_field")),
        Err(CoreError::ZeroField) => Ok(row(None, "zero_field")),
        Err(e) => Err(e.into()),
    }
}

pub fn sweep_rows(
    param: SweepParam,
    min: f64,
    max: f64,
    steps: usize,
    kappa: Option<f64>,
    s: Option<f64>,
    r: Option<f64>,
) -> CliResult<Vec<SweepRow>> {
    if steps < 2 {
        return Err(CliError::Input(format!("--steps must be at least 2, got {steps}")));
    }
    if !(min.is_finite() && max.is_finite() && min < max) {
        return Err(CliError::Input(format!("need finite --min < --max, got [{min}, {max}]")));
    }
    (0..steps)
        .into_par_iter()
        .map(|i| {
            let x = if i == steps - 1 { max } else { min + (max - min) * i as f64 / (steps - 1) as f64 };
            sweep_point(param, x, kappa, s, r)
        })
        .collect()
}

pub fn sweep(a: &SweepArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let b = Base::load(&a.common, &["param", "min", "max", "steps"])?;
    let param = match a.param {
        Some(p) => p,
        None => match b.cfg.string(None, "param")?.as_deref() {
            Some("r") => SweepParam::R,
            Some("s") => SweepParam::S,
            Some("kappa") => SweepParam::Kappa,
            Some("energy") => SweepParam::Energy,
            Some(other) => return Err(CliError::Input(format!("unknown sweep parameter '{other}'"))),
            None => return Err(CliError::Input("missing --param".into())),
        },
    };
    let min = required(b.cfg.f64(a.min, "min")?, "min")?;
    let max = required(b.cfg.f64(a.max, "max")?, "max")?;
    let steps = b.cfg.usize(a.steps, "steps")?.unwrap_or(50);
    let rows = sweep_rows(param, min, max, steps, b.kappa, b.s, b.r)?;
    let text = if b.json {
        json_line(&rows)?
    } else {
        let mut t = String::from("param,value,capacity_or_period,status\n");
        for row in &rows {
            let value = row.value.map(sig17).unwrap_or_default();
            writeln!(t, "{},{},{},{}", sig17(row.param), value, row.capacity_or_period, row.status)
                .expect("writing to a String");
        }
        t
    };
    emit(b.out.as_deref(), &text, stdout)
}

pub fn area(a: &AreaArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let b = Base::load(&a.common, &["energy", "grid"])?;
    let sys = b.system()?;
    let energy = match b.cfg.f64(a.energy, "energy")? {
        Some(e) => e,
        None => 0.5 * b.r()?.powi(2),
    };
    let grid = b.cfg.usize(a.grid, "grid")?.unwrap_or(256);
    let area = analysis::swept_symplectic_area(&sys, energy, grid, grid, b.tol)?;
    let closed = dynamics::h_of_energy(&sys, energy)?;
    let text = if b.json {
        json_line(&json!({
            "kappa": sys.k(), "s": sys.s, "energy": energy, "grid": grid,
            "area": area, "closed_form": closed, "difference": area - closed,
        }))?
    } else {
        format!(
            "area {}\nclosed_form {}\ndifference {}\n",
            sig17(area),
            sig17(closed),
            sig17(area - closed)
        )
    };
    emit(b.out.as_deref(), &text, stdout)
}

pub fn mane(a: &ManeArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let b = Base::load(&a.common, &["below", "above", "horizon", "threshold", "transient"])?;
    let sys = b.system()?;
    if sys.k() >= 0.0 {
        return Err(CliError::Input(format!("mane needs kappa < 0, got {}", sys.k())));
    }
    if sys.s == 0.0 {
        return Err(CoreError::ZeroField.into());
    }
    let c = &b.cfg;
    let critical = sys.s.abs() / (-sys.k()).sqrt();
    let below = c.f64(a.below, "below")?.unwrap_or(0.5 * critical);
    let above = c.f64(a.above, "above")?.unwrap_or(2.0 * critical);
    let horizon = c.f64(a.horizon, "horizon")?.unwrap_or(50.0);
    let threshold = c.f64(a.threshold, "threshold")?.unwrap_or(DEFAULT_RETURN_THRESHOLD);
    let transient = c.f64(a.transient, "transient")?.unwrap_or_else(|| default_transient(&sys));
    if !(below > 0.0 && below < critical) {
        return Err(CliError::Input(format!("--below {below} must lie in (0, {critical})")));
    }
    if !(above >= critical) {
        return Err(CliError::Input(format!("--above {above} must be at least the critical speed {critical}")));
    }

    let closed_st = sys.state_with_speed(below);
    let period = dynamics::period_of_energy(&sys, 0.5 * below * below)?;
    let ret = first_return(&sys, &closed_st, &HamiltonianKind::Kinetic, b.tol, 1.5 * period)?;
    let esc = escape_witness(&sys, &sys.state_with_speed(above), horizon, threshold, transient)?;
    let certified = ret.converged && esc.escaped;

    let text = if b.json {
        json_line(&json!({
            "kappa": sys.k(), "s": sys.s, "critical_speed": critical, "certified": certified,
            "below": { "speed": below, "predicted_period": period, "report": ret },
            "above": { "speed": above, "horizon": horizon, "report": esc },
        }))?
    } else {
        format!(
            "critical_speed {}\n\
             below speed {} closed {} period {} predicted {} closure_error {}\n\
             above speed {} escaped {} max_distance {} min_return_after_transient {}\n\
             certified {}\n",
            sig17(critical),
            sig17(below),
            ret.converged,
            sig17(ret.period),
            sig17(period),
            sig17(ret.closure_error),
            sig17(above),
            esc.escaped,
            sig17(esc.max_distance),
            sig17(esc.min_return_after_transient),
            certified
        )
    };
    emit(b.out.as_deref(), &text, stdout)
}
