use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::grid_values::NodeValues;
use crate::models::BurgersDiscretization;
use crate::optimizer::{HistoryEntry, Phase, SolverReport, StepFlag};
use crate::time_transform::{Side, TauParameter};

/// Seventeen significant digits, enough for an exact round trip.
pub(crate) fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn side_label(side: Side) -> &'static str {
    match side {
        Side::Left => "left",
        Side::Right => "right",
    }
}

fn header(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (1..=n).map(move |k| format!("{prefix}_{k}"))
}

/// Writes `s, t, side, y_*, u_*, p_*`. There is one row per adjoint value, so
/// the node at `s = 1` appears twice (left then right) with the same state
/// and control.
pub fn write_trajectory_csv(path: &Path, report: &SolverReport) -> Result<()> {
    let grid = report.y_star.grid();
    let tp = TauParameter::new(report.tau_star, report.horizon)?;
    let times = tp.physical_times(&grid);
    let (n, m) = (report.y_star.dim(), report.u_star.dim());
    let mut w = BufWriter::new(File::create(path)?);
    let cols: Vec<String> = ["s", "t", "side"]
        .into_iter()
        .map(String::from)
        .chain(header("y", n))
        .chain(header("u", m))
        .chain(header("p", n))
        .collect();
    writeln!(w, "{}", cols.join(","))?;
    for r in 0..report.p_star.n_rows() {
        let (i, side) = report.p_star.row_node(r);
        let mut row = vec![num(grid.node(i)), num(times[i]), side_label(side).to_string()];
        row.extend(report.y_star.node(i).iter().map(|v| num(*v)));
        row.extend(report.u_star.node(i).iter().map(|v| num(*v)));
        row.extend(report.p_star.row_values(r).iter().map(|v| num(*v)));
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

fn flag_label(f: StepFlag) -> &'static str {
    match f {
        StepFlag::TauClamped => "tau-clamped",
        StepFlag::BbFallback => "bb-fallback",
        StepFlag::GmresFallback => "gmres-fallback",
    }
}

pub fn write_history_csv(path: &Path, history: &[HistoryEntry]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "phase,iteration,grad_norm,objective,tau,step,gmres_iterations,flags")?;
    for e in history {
        let phase = match e.phase {
            Phase::Bb => "bb",
            Phase::Newton => "newton",
        };
        let flags: Vec<&str> = e.flags.iter().map(|f| flag_label(*f)).collect();
        writeln!(
            w,
            "{phase},{},{},{},{},{},{},{}",
            e.iteration,
            num(e.grad_norm),
            num(e.objective),
            num(e.tau),
            num(e.step),
            e.gmres_iterations,
            flags.join(";")
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Values at parameter `s`, linear between grid nodes.
pub fn interpolate(values: &NodeValues, s: f64) -> Vec<f64> {
    let grid = values.grid();
    let n = grid.n_steps();
    let x = (s / grid.step()).clamp(0.0, n as f64);
    let j = (x.floor() as usize).min(n - 1);
    let w = x - j as f64;
    values
        .node(j)
        .iter()
        .zip(values.node(j + 1))
        .map(|(a, b)| (1.0 - w) * a + w * b)
        .collect()
}

/// One CSV per physical time with columns `x, t, y, u` on the full mesh
/// (boundary states and controls outside `omega` are zero). Returns the
/// paths written, in the order of `times`.
pub fn write_snapshots(
    dir: &Path,
    disc: &BurgersDiscretization,
    report: &SolverReport,
    times: &[f64],
) -> Result<Vec<PathBuf>> {
    let tp = TauParameter::new(report.tau_star, disc.params.horizon)?;
    let mut paths = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        let s = tp.s_of_t(t)?;
        let y = disc.full_state(&interpolate(&report.y_star, s));
        let u = disc.full_control(&interpolate(&report.u_star, s));
        let path = dir.join(format!("snapshot_{k:02}.csv"));
        let mut w = BufWriter::new(File::create(&path)?);
        writeln!(w, "x,t,y,u")?;
        let t = num(t);
        for i in 0..disc.mesh.n_nodes() {
            writeln!(w, "{},{t},{},{}", num(disc.mesh.node(i)), num(y[i]), num(u[i]))?;
        }
        w.flush()?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time_transform::SGrid;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn interpolation_is_exact_at_nodes_and_linear_between() {
        let grid = SGrid::new(4).unwrap();
        let v = NodeValues::from_fn(grid, 1, |_, s, _| 3.0 * s - 1.0);
        for i in 0..=4 {
            assert_eq!(interpolate(&v, grid.node(i))[0], v.node(i)[0]);
        }
        assert!((interpolate(&v, 0.3)[0] - (-0.1)).abs() < 1e-15);
        assert!((interpolate(&v, 1.9)[0] - 4.7).abs() < 1e-14);
    }
}
