use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use qmicro_core::dos::{document_backing, DOS_KIND};
use qmicro_core::spectrum::{build_ising_chain, build_uniform_ladder, from_eigenvalues, parse_spectrum};
use qmicro_core::{Backing, DensityOfStates, Rational, Spectrum};

/// Exactly one spectrum source.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct SourceArgs {
    /// Uniform ladder with N+1 levels 0, 1, ..., N.
    #[arg(long, value_name = "N")]
    pub ladder: Option<usize>,
    /// Three-spin Ising ring, e.g. J=0.25,B=1.
    #[arg(long, value_name = "J=..,B=..")]
    pub ising: Option<String>,
    /// Comma-separated eigenvalues; repeated values are degenerate.
    #[arg(long, value_name = "a,b,c", allow_hyphen_values = true)]
    pub levels: Option<String>,
    /// Spectrum file (JSON or text) or a saved density of states.
    #[arg(long, value_name = "PATH")]
    pub file: Option<PathBuf>,
}

/// Second system for `equilibrate`; defaults to a copy of the first.
#[derive(Args, Debug, Clone)]
#[group(required = false, multiple = false)]
pub struct SecondSourceArgs {
    #[arg(long, value_name = "N")]
    pub b_ladder: Option<usize>,
    #[arg(long, value_name = "J=..,B=..")]
    pub b_ising: Option<String>,
    #[arg(long, value_name = "a,b,c", allow_hyphen_values = true)]
    pub b_levels: Option<String>,
    #[arg(long, value_name = "PATH")]
    pub b_file: Option<PathBuf>,
}

impl SecondSourceArgs {
    pub fn into_source(self) -> Option<SourceArgs> {
        let SecondSourceArgs { b_ladder: ladder, b_ising: ising, b_levels: levels, b_file: file } = self;
        (ladder.is_some() || ising.is_some() || levels.is_some() || file.is_some())
            .then_some(SourceArgs { ladder, ising, levels, file })
    }
}

pub enum AnyDos {
    Float(DensityOfStates<f64>),
    Exact(DensityOfStates<Rational>),
}

/// Runs `$body` with `$d` bound to the density of states in either backing.
macro_rules! with_dos {
    ($any:expr, |$d:ident| $body:expr) => {
        match $any {
            $crate::source::AnyDos::Float($d) => $body,
            $crate::source::AnyDos::Exact($d) => $body,
        }
    };
}
pub(crate) use with_dos;

impl AnyDos {
    pub fn spectrum(&self) -> &Spectrum {
        with_dos!(self, |d| d.spectrum())
    }

    pub fn backing(&self) -> Backing {
        with_dos!(self, |d| d.backing())
    }
}

enum Loaded {
    Spectrum(Spectrum),
    Dos(serde_json::Value),
}

fn parse_ising(params: &str) -> Result<(f64, f64)> {
    let (mut j, mut b) = (None, None);
    for part in params.split(',') {
        let (key, value) = part
            .split_once('=')
            .with_context(|| format!("expected KEY=VALUE in --ising, got {part:?}"))?;
        let value: f64 = value
            .trim()
            .parse()
            .with_context(|| format!("invalid number {value:?} in --ising"))?;
        match key.trim() {
            "J" | "j" => j = Some(value),
            "B" | "b" => b = Some(value),
            other => bail!("unknown --ising parameter {other:?}; expected J and B"),
        }
    }
    match (j, b) {
        (Some(j), Some(b)) => Ok((j, b)),
        _ => bail!("--ising needs both J and B, e.g. J=0.25,B=1"),
    }
}

fn parse_levels(list: &str) -> Result<Vec<f64>> {
    list.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .with_context(|| format!("invalid eigenvalue {x:?} in --levels"))
        })
        .collect()
}

fn read_file(path: &Path) -> Result<Loaded> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    if let Ok(value) = serde_json::from_str::<serde_json::Value>(&text) {
        if value.get("kind").and_then(|k| k.as_str()) == Some(DOS_KIND) {
            return Ok(Loaded::Dos(value));
        }
    }
    let s = parse_spectrum(&text).with_context(|| format!("invalid spectrum file {}", path.display()))?;
    Ok(Loaded::Spectrum(s))
}

fn load(src: &SourceArgs) -> Result<Loaded> {
    let s = if let Some(n) = src.ladder {
        build_uniform_ladder(n, 1.0)?
    } else if let Some(params) = &src.ising {
        let (j, b) = parse_ising(params)?;
        build_ising_chain(j, b)?
    } else if let Some(list) = &src.levels {
        from_eigenvalues(&parse_levels(list)?, 0.0)?
    } else if let Some(path) = &src.file {
        return read_file(path);
    } else {
        bail!("no spectrum source given");
    };
    Ok(Loaded::Spectrum(s))
}

/// The spectrum alone, ignoring any stored coefficients.
pub fn load_spectrum(src: &SourceArgs, scale: f64) -> Result<Spectrum> {
    let s = match load(src)? {
        Loaded::Spectrum(s) => s,
        Loaded::Dos(value) => match document_backing(&value)? {
            Backing::Float => DensityOfStates::<f64>::from_json(&value)?.spectrum().clone(),
            Backing::Rational => DensityOfStates::<Rational>::from_json(&value)?.spectrum().clone(),
        },
    };
    rescale(s, scale)
}

fn rescale(s: Spectrum, scale: f64) -> Result<Spectrum> {
    if scale == 1.0 {
        Ok(s)
    } else {
        Ok(s.affine(scale, 0.0)?)
    }
}

/// Builds the density of states, or reloads it from a saved document.
pub fn load_dos(src: &SourceArgs, rational: bool, scale: f64) -> Result<AnyDos> {
    match load(src)? {
        Loaded::Spectrum(s) => {
            let s = rescale(s, scale)?;
            Ok(if rational {
                AnyDos::Exact(DensityOfStates::build(&s)?)
            } else {
                AnyDos::Float(DensityOfStates::build(&s)?)
            })
        }
        Loaded::Dos(value) => {
            if scale != 1.0 {
                bail!("--scale cannot be applied to a saved density of states");
            }
            match document_backing(&value)? {
                Backing::Float if rational => {
                    bail!("saved density of states is floating point; --rational needs a rational document")
                }
                Backing::Float => Ok(AnyDos::Float(DensityOfStates::from_json(&value)?)),
                Backing::Rational => Ok(AnyDos::Exact(DensityOfStates::from_json(&value)?)),
            }
        }
    }
}
