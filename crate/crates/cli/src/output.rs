use std::fs;
use std::io::Write;
use std::path::Path;

use magcap_core::dynamics::{kinetic_energy, MagneticSystem, PhaseState, Trajectory};

use crate::error::CliResult;

pub const TRAJECTORY_HEADER: &str = "t,x,y,u,w,chart,energy";

/// Decimal representation with 17 significant digits, which round-trips every
/// `f64`. Positional notation is used for moderate exponents.
pub fn sig17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..17).contains(&exp) {
        return sci;
    }
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let out = if exp < 0 {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    } else {
        let split = exp as usize + 1;
        format!("{}.{}", &digits[..split], &digits[split..])
    };
    let out = out.strip_suffix('.').unwrap_or(&out).to_string();
    format!("{sign}{out}")
}

pub fn trajectory_csv(sys: &MagneticSystem, traj: &Trajectory) -> String {
    let mut out = String::with_capacity(96 * traj.samples.len());
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for smp in &traj.samples {
        let st = &smp.state;
        out.push_str(&trajectory_row(smp.t, st, kinetic_energy(sys, st)));
    }
    out
}

fn trajectory_row(t: f64, st: &PhaseState, energy: f64) -> String {
    format!(
        "{},{},{},{},{},{},{}\n",
        sig17(t),
        sig17(st.p.x),
        sig17(st.p.y),
        sig17(st.u),
        sig17(st.w),
        st.p.chart.label(),
        sig17(energy)
    )
}

/// Write `content` to `path` through a temporary sibling file, so that a
/// failure never leaves a partial file behind.
pub fn write_atomic(path: &Path, content: &str) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(content.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Send `content` to `out` if given, else to `stdout`.
pub fn emit(out: Option<&Path>, content: &str, stdout: &mut dyn Write) -> CliResult<()> {
    match out {
        Some(p) => write_atomic(p, content),
        None => {
            stdout.write_all(content.as_bytes())?;
            Ok(())
        }
    }
}
