use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{
    accessible_range, energy_uncertainty, entropy, specific_heat, temperature, PointOptions,
};
use crate::dos::DensityOfStates;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Cell-centred energy grid: `count` points at `lo + (i + ½)(hi − lo)/count`,
/// which keeps both ends (and, for commensurate grids, the knots) off the
/// grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyGrid {
    pub count: usize,
    /// Defaults to the accessible range, or the whole support with
    /// `negative_branch`.
    pub range: Option<(f64, f64)>,
    pub negative_branch: bool,
}

impl EnergyGrid {
    pub fn new(count: usize) -> Self {
        EnergyGrid { count, range: None, negative_branch: false }
    }

    pub fn points(&self, lo: f64, hi: f64) -> Vec<f64> {
        let h = (hi - lo) / self.count as f64;
        (0..self.count).map(|i| lo + (i as f64 + 0.5) * h).collect()
    }
}

impl Default for EnergyGrid {
    fn default() -> Self {
        EnergyGrid::new(2000)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoRow {
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "S")]
    pub entropy: f64,
    #[serde(rename = "T")]
    pub temperature: f64,
    #[serde(rename = "C")]
    pub specific_heat: f64,
    #[serde(rename = "dH")]
    pub energy_uncertainty: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermoCurve {
    pub rows: Vec<ThermoRow>,
    pub range: (f64, f64),
    pub count: usize,
    pub spacing: String,
}

impl ThermoCurve {
    /// CSV with header `E,S,T,C,dH`, 17 significant digits, LF endings.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "E,S,T,C,dH")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                fmt17(r.energy),
                fmt17(r.entropy),
                fmt17(r.temperature),
                fmt17(r.specific_heat),
                fmt17(r.energy_uncertainty)
            )?;
        }
        Ok(())
    }
}

/// 17 significant digits, scientific notation, independent of locale.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Samples `(E, S, T, C, ΔH)` over the grid. On the equilibrium branch the
/// temperature must increase strictly along the grid.
pub fn thermo_curve<S: Scalar>(d: &DensityOfStates<S>, grid: &EnergyGrid) -> Result<ThermoCurve> {
    if grid.count < 2 {
        return Err(Error::InvalidArgument("grid needs at least 2 points".into()));
    }
    let acc = accessible_range(d);
    let (lo, hi) = match grid.range {
        Some(r) => r,
        None if grid.negative_branch => (acc.e_min, acc.e_max),
        None => {
            if acc.frozen {
                return Err(Error::Frozen("Ω is maximal at E_min".into()));
            }
            (acc.e_min, acc.e_star)
        }
    };
    let upper = if grid.negative_branch { acc.e_max } else { acc.e_star };
    if !(lo < hi) || lo < acc.e_min || hi > upper {
        return Err(Error::InvalidArgument(format!(
            "grid range [{lo}, {hi}] is outside [{}, {upper}]",
            acc.e_min
        )));
    }
    let opts = PointOptions { negative_branch: grid.negative_branch, ..Default::default() };
    let mut rows = Vec::with_capacity(grid.count);
    for e in grid.points(lo, hi) {
        let t = match temperature(d, e, opts) {
            Ok(t) => t,
            Err(Error::InfiniteTemperature(_)) => f64::INFINITY,
            Err(err) => return Err(err),
        };
        let c = match specific_heat(d, e, opts) {
            Ok(c) => c,
            Err(Error::DivergentHeat(_)) => f64::INFINITY,
            Err(Error::InfiniteTemperature(_)) => 0.0,
            Err(err) => return Err(err),
        };
        rows.push(ThermoRow {
            energy: e,
            entropy: entropy(d, e)?,
            temperature: t,
            specific_heat: c,
            energy_uncertainty: energy_uncertainty(d, e)?,
        });
    }
    if !grid.negative_branch {
        if let Some(w) = rows.windows(2).find(|w| !(w[1].temperature > w[0].temperature)) {
            return Err(Error::InternalConsistency(format!(
                "temperature not increasing between E = {} and E = {}",
                w[0].energy, w[1].energy
            )));
        }
    }
    Ok(ThermoCurve {
        rows,
        range: (lo, hi),
        count: grid.count,
        spacing: "cell-centred uniform".into(),
    })
}

/// Least-squares slope of `ln C` against `ln |T − T_c|` over rows whose
/// temperature lies in `[t_lo, t_hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub t_c: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub points: usize,
    pub exponent: f64,
}

pub fn fit_power_law(curve: &ThermoCurve, t_c: f64, t_lo: f64, t_hi: f64) -> Option<PowerLawFit> {
    let pts: Vec<(f64, f64)> = curve
        .rows
        .iter()
        .filter(|r| r.temperature >= t_lo && r.temperature <= t_hi)
        .filter(|r| r.temperature != t_c && r.specific_heat > 0.0 && r.specific_heat.is_finite())
        .map(|r| ((r.temperature - t_c).abs().ln(), r.specific_heat.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(PowerLawFit { t_c, t_lo, t_hi, points: pts.len(), exponent: sxy / sxx })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dos::{density_of_states, density_of_states_exact};
    use crate::spectrum::{build_uniform_ladder, from_eigenvalues};

    #[test]
    fn four_level_curve_shows_the_drop() {
        let d = density_of_states(&build_uniform_ladder(3, 1.0).unwrap()).unwrap();
        let curve = thermo_curve(&d, &EnergyGrid::new(1000)).unwrap();
        assert_eq!(curve.rows.len(), 1000);
        let below: Vec<_> = curve.rows.iter().filter(|r| r.temperature < 0.5).collect();
        let above: Vec<_> = curve.rows.iter().filter(|r| r.temperature > 0.5).collect();
        assert!(below.iter().all(|r| (r.specific_heat - 2.0).abs() < 1e-9));
        let first_above = above.first().unwrap();
        assert!((first_above.specific_heat - 0.5).abs() < 0.01);
    }

    #[test]
    fn degenerate_curve_is_monotone() {
        let s = from_eigenvalues(&[0.0, 1.0, 1.0, 2.0, 3.0], 0.0).unwrap();
        let d = density_of_states_exact(&s).unwrap();
        let curve = thermo_curve(&d, &EnergyGrid::new(200)).unwrap();
        assert!(curve.rows.windows(2).all(|w| w[1].temperature > w[0].temperature));
        assert!(curve.rows.iter().all(|r| r.temperature > 0.0));
    }

    #[test]
    fn two_level_is_rejected() {
        let d = density_of_states(&build_uniform_ladder(1, 1.0).unwrap()).unwrap();
        assert!(matches!(thermo_curve(&d, &EnergyGrid::new(10)), Err(Error::Frozen(_))));
    }

    #[test]
    fn bad_grids() {
        let d = density_of_states(&build_uniform_ladder(3, 1.0).unwrap()).unwrap();
        assert!(thermo_curve(&d, &EnergyGrid::new(1)).is_err());
        let g = EnergyGrid { count: 10, range: Some((0.0, 2.0)), negative_branch: false };
        assert!(matches!(thermo_curve(&d, &g), Err(Error::InvalidArgument(_))));
        let g = EnergyGrid { count: 10, range: None, negative_branch: true };
        let curve = thermo_curve(&d, &g).unwrap();
        assert!(curve.rows.last().unwrap().temperature < 0.0);
    }

    #[test]
    fn csv_format() {
        let d = density_of_states(&build_uniform_ladder(2, 1.0).unwrap()).unwrap();
        let curve = thermo_curve(&d, &EnergyGrid::new(2)).unwrap();
        let mut buf = Vec::new();
        curve.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "E,S,T,C,dH");
        assert!(lines[1].starts_with("2.5000000000000000e-1,"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn power_law_slope() {
        let rows = (1..50)
            .map(|i| {
                let t = 1.0 + i as f64 * 0.01;
                ThermoRow {
                    energy: t,
                    entropy: 0.0,
                    temperature: t,
                    specific_heat: (t - 1.0).powi(-2),
                    energy_uncertainty: 0.0,
                }
            })
            .collect();
        let curve = ThermoCurve { rows, range: (0.0, 1.0), count: 49, spacing: String::new() };
        let fit = fit_power_law(&curve, 1.0, 1.0, 2.0).unwrap();
        assert!((fit.exponent + 2.0).abs() < 1e-12);
    }
}
