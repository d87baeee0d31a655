use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use qmicro_core::oracle::{empirical_dos, empirical_microcanonical};
use qmicro_core::thermo::{
    accessible_range, critical_points, energy_uncertainty, equilibrate, fit_power_law, fmt17,
    microcanonical_weights, thermo_curve,
};
use qmicro_core::{DensityOfStates, EnergyGrid, Scalar, Spectrum, SCHEMA_VERSION};
use serde_json::{json, Value};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::source::{load_dos, load_spectrum, with_dos};
use crate::{CompareArgs, DosArgs, EquilibrateArgs, Failure, ThermoArgs};

fn spectrum_json(s: &Spectrum) -> Value {
    json!(s.levels().iter().map(|l| json!([l.energy, l.multiplicity])).collect::<Vec<_>>())
}

/// Where the report goes: stdout, unless the data itself does.
fn emit(report: &Value, data_on_stdout: bool) -> Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    let written = if data_on_stdout {
        writeln!(std::io::stderr().lock(), "{text}")
    } else {
        writeln!(std::io::stdout().lock(), "{text}")
    };
    match written {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn to_stdout(out: &Option<PathBuf>) -> bool {
    out.as_deref() == Some(Path::new("-"))
}

/// Opens `out` for writing; `-` is stdout.
fn writer(out: &Path) -> Result<Box<dyn Write>> {
    if out == Path::new("-") {
        return Ok(Box::new(std::io::stdout().lock()));
    }
    let file = File::create(out).with_context(|| format!("cannot create {}", out.display()))?;
    Ok(Box::new(BufWriter::new(file)))
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut w = writer(path)?;
    writeln!(w, "{}", serde_json::to_string_pretty(value)?)?;
    w.flush()?;
    Ok(())
}

fn parse_range(text: &str) -> Result<(f64, f64)> {
    let (lo, hi) = text.split_once(':').context("expected LO:HI")?;
    let lo: f64 = lo.trim().parse().with_context(|| format!("invalid bound {lo:?}"))?;
    let hi: f64 = hi.trim().parse().with_context(|| format!("invalid bound {hi:?}"))?;
    if !(lo < hi) {
        bail!("empty range {lo}:{hi}");
    }
    Ok((lo, hi))
}

fn sidecar(out: &Path) -> PathBuf {
    out.with_extension("smoothness.json")
}

pub fn dos(args: DosArgs) -> Result<()> {
    let d = load_dos(&args.source, args.rational, args.scale)?;
    let report = with_dos!(&d, |d| dos_report(d, &args))?;
    emit(&report, to_stdout(&args.out))
}

fn dos_report<S: Scalar>(d: &DensityOfStates<S>, args: &DosArgs) -> Result<Value> {
    let (lo, hi) = match &args.range {
        Some(r) => parse_range(r)?,
        None => (d.e_min(), d.e_max()),
    };
    let grid = EnergyGrid::new(args.grid);
    let smoothness = d.smoothness_report();
    let mut written = Vec::new();
    if let Some(out) = &args.out {
        if is_json(out) {
            write_json(out, &d.to_json())?;
        } else {
            let mut w = writer(out)?;
            writeln!(w, "E,Omega,dOmega,d2Omega")?;
            // Derivatives above the piece degree vanish between levels.
            let derivative = |e: f64, k: usize| if k < d.n() { d.evaluate(e, k) } else { Ok(0.0) };
            for e in grid.points(lo, hi) {
                writeln!(
                    w,
                    "{},{},{},{}",
                    fmt17(e),
                    fmt17(d.evaluate(e, 0)?),
                    fmt17(derivative(e, 1)?),
                    fmt17(derivative(e, 2)?)
                )?;
            }
            w.flush()?;
            if out != Path::new("-") {
                let side = sidecar(out);
                write_json(&side, &json!({ "schema_version": SCHEMA_VERSION, "smoothness": smoothness }))?;
                written.push(side.display().to_string());
            }
        }
        written.insert(0, out.display().to_string());
    }
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "command": "dos",
        "backing": d.backing(),
        "spectrum": spectrum_json(d.spectrum()),
        "n": d.n(),
        "support": [d.e_min(), d.e_max()],
        "normalization": d.volume(),
        "grid": { "count": args.grid, "range": [lo, hi] },
        "smoothness": smoothness,
        "outputs": written,
    }))
}

pub fn thermo(args: ThermoArgs) -> Result<()> {
    let d = load_dos(&args.source, args.rational, args.scale)?;
    let report = with_dos!(&d, |d| thermo_report(d, &args))?;
    emit(&report, to_stdout(&args.out))
}

fn thermo_report<S: Scalar>(d: &DensityOfStates<S>, args: &ThermoArgs) -> Result<Value> {
    let range = accessible_range(d);
    let mut grid = EnergyGrid::new(args.grid);
    grid.negative_branch = args.negative_branch;
    if let Some(r) = &args.range {
        grid.range = Some(parse_range(r)?);
    }
    let curve = thermo_curve(d, &grid)?;
    let points = critical_points(d);
    let mut fits = Vec::new();
    for window in &args.fit_exponents {
        let (lo, hi) = parse_range(window)?;
        for p in &points {
            fits.push(match fit_power_law(&curve, p.t_c, lo, hi) {
                Some(f) => json!(f),
                None => json!({ "t_c": p.t_c, "t_lo": lo, "t_hi": hi, "points": 0, "exponent": null }),
            });
        }
    }
    if let Some(out) = &args.out {
        let mut w = writer(out)?;
        curve.write_csv(&mut w)?;
        w.flush()?;
    }
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "command": "thermo",
        "backing": d.backing(),
        "spectrum": spectrum_json(d.spectrum()),
        "accessible_range": range,
        "grid": { "count": curve.count, "range": [curve.range.0, curve.range.1], "spacing": curve.spacing },
        "negative_branch": args.negative_branch,
        "critical_points": points,
        "fits": fits,
        "outputs": args.out.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
    }))
}

/// Midpoint of the widest gap between adjacent levels, away from every knot.
fn default_energy(s: &Spectrum) -> f64 {
    let levels = s.levels();
    let (a, b) = levels
        .windows(2)
        .map(|w| (w[0].energy, w[1].energy))
        .fold((levels[0].energy, levels[0].energy), |best, (a, b)| {
            if b - a > best.1 - best.0 {
                (a, b)
            } else {
                best
            }
        });
    a + 0.5 * (b - a)
}

pub fn compare(args: CompareArgs) -> Result<()> {
    let s = load_spectrum(&args.source, args.scale)?;
    let d = DensityOfStates::<f64>::build(&s)?;
    let e = args.energy.unwrap_or_else(|| default_energy(&s));
    let window = args.window.unwrap_or(0.01 * (s.e_max() - s.e_min()));
    let alpha = args.alpha;
    if !(alpha > 0.0 && alpha < 1.0) {
        bail!("--alpha must lie in (0, 1)");
    }

    let exact_weights = microcanonical_weights(&d, e)?;
    let exact_dh = energy_uncertainty(&d, e)?;
    let est = empirical_microcanonical(&s, e, window, args.samples, args.seed.wrapping_add(1))?;
    let histogram = empirical_dos(&s, args.samples, args.bins, args.seed)?;

    let mut z: Vec<f64> = est
        .weights
        .iter()
        .zip(&est.weight_standard_errors)
        .zip(&exact_weights)
        .map(|((w, se), x)| (w - x) / se)
        .collect();
    let dh_z = (est.energy_uncertainty - exact_dh) / est.energy_uncertainty_standard_error;
    z.push(dh_z);
    // Two-sided Bonferroni threshold over all compared quantities.
    let normal = Normal::standard();
    let threshold = normal.inverse_cdf(1.0 - alpha / (2.0 * z.len() as f64));
    let max_z = z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let weights_pass = max_z <= threshold;
    let dos_pass = histogram.p_value > alpha;

    if let Some(out) = &args.out {
        let mut w = writer(out)?;
        histogram.write_csv(&mut w)?;
        w.flush()?;
    }
    let pass = dos_pass && weights_pass;
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "compare",
        "spectrum": spectrum_json(&s),
        "samples": args.samples,
        "seed": args.seed,
        "alpha": alpha,
        "dos": {
            "histogram": histogram.metadata(),
            "pass": dos_pass,
        },
        "weights": {
            "energy": e,
            "window": window,
            "retained": est.retained,
            "analytic": exact_weights,
            "estimated": est.weights,
            "standard_errors": est.weight_standard_errors,
            "energy_uncertainty": {
                "analytic": exact_dh,
                "estimated": est.energy_uncertainty,
                "standard_error": est.energy_uncertainty_standard_error,
                "window_variance": est.window_variance,
            },
            "max_abs_z": max_z,
            "threshold": threshold,
            "pass": weights_pass,
        },
        "pass": pass,
        "outputs": args.out.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
    });
    emit(&report, to_stdout(&args.out))?;
    if !pass {
        return Err(Failure::Oracle("oracle disagrees with the analytic result".into()).into());
    }
    Ok(())
}

pub fn equilibrate_cmd(args: EquilibrateArgs) -> Result<()> {
    let a = load_dos(&args.source, args.rational, args.scale)?;
    let b = match args.second.clone().into_source() {
        Some(src) => load_dos(&src, args.rational, args.scale)?,
        None => load_dos(&args.source, args.rational, args.scale)?,
    };
    let eq = with_dos!(&a, |d1| with_dos!(&b, |d2| equilibrate(d1, args.e1, d2, args.e2)))?;
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "equilibrate",
        "first": { "spectrum": spectrum_json(a.spectrum()), "backing": a.backing(), "E": args.e1 },
        "second": { "spectrum": spectrum_json(b.spectrum()), "backing": b.backing(), "E": args.e2 },
        "epsilon_star": eq.epsilon_star,
        "T_common": eq.t_common(),
        "T1": eq.t1,
        "T2": eq.t2,
        "kind": eq.kind,
        "E1_final": args.e1 + eq.epsilon_star,
        "E2_final": args.e2 - eq.epsilon_star,
    });
    emit(&report, false)
}
