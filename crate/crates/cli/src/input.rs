use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use graphon_core::finite::{parse_edge_list, FiniteGraph};
use graphon_core::{AnalyticGraphon, Kernel, StepGraphon};

use crate::CliError;

/// Blocks used for families without an exact step form.
pub const DEFAULT_BLOCKS: usize = 512;

#[derive(Debug, Clone, Args)]
pub struct Source {
    /// Step graphon as JSON: {"boundaries": [...], "values": [[...]]}
    #[arg(long, conflicts_with = "spec")]
    pub input: Option<PathBuf>,
    /// Spec string: min, const:a, twoblock:a,b,alpha, lower:d, upper:d, appendix:N
    #[arg(long)]
    pub spec: Option<String>,
    /// Discretize the spec family on this many equal blocks
    #[arg(long)]
    pub blocks: Option<usize>,
}

/// A loaded input: either a step graphon read from disk or an analytic
/// family together with its step representation.
pub enum Loaded {
    File(StepGraphon),
    Family(AnalyticGraphon, StepGraphon),
}

impl Loaded {
    pub fn step(&self) -> &StepGraphon {
        match self {
            Loaded::File(g) | Loaded::Family(_, g) => g,
        }
    }
}

impl Kernel for Loaded {
    fn value(&self, x: f64, y: f64) -> f64 {
        match self {
            Loaded::File(g) => g.value(x, y),
            Loaded::Family(a, _) => a.value(x, y),
        }
    }
}

fn read(path: &Path, field: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::input(field, format!("{}: {e}", path.display())))
}

pub fn load_json(path: &Path, field: &str) -> Result<StepGraphon, CliError> {
    let text = read(path, field)?;
    serde_json::from_str(&text).map_err(|e| CliError::input(field, format!("{}: {e}", path.display())))
}

pub fn load_spec(spec: &str, blocks: Option<usize>, field: &str) -> Result<Loaded, CliError> {
    let family: AnalyticGraphon = spec.parse().map_err(|e| CliError::input(field, e))?;
    let step = match (blocks, family.native_step()) {
        (_, Err(e)) => return Err(CliError::input(field, e)),
        (Some(m), _) => family.discretize(m).map_err(|e| CliError::input("--blocks", e))?,
        (None, Ok(Some(g))) => g,
        (None, Ok(None)) => family
            .discretize(DEFAULT_BLOCKS)
            .map_err(|e| CliError::input(field, e))?,
    };
    Ok(Loaded::Family(family, step))
}

impl Source {
    pub fn load(&self) -> Result<Loaded, CliError> {
        match (&self.input, &self.spec) {
            (Some(path), None) => {
                if self.blocks.is_some() {
                    return Err(CliError::input("--blocks", "only applies to --spec"));
                }
                Ok(Loaded::File(load_json(path, "--input")?))
            }
            (None, Some(spec)) => load_spec(spec, self.blocks, "--spec"),
            _ => Err(CliError::input("--input/--spec", "exactly one is required")),
        }
    }
}

/// `--a`/`--b` accept a spec string or a path to a JSON step graphon.
pub fn load_operand(arg: &str, blocks: Option<usize>, field: &str) -> Result<StepGraphon, CliError> {
    if arg.parse::<AnalyticGraphon>().is_ok() {
        return Ok(load_spec(arg, blocks, field)?.step().clone());
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(CliError::input(field, format!("{arg:?} is neither a spec string nor a file")));
    }
    load_json(path, field)
}

pub fn load_graph(path: &Path) -> Result<FiniteGraph, CliError> {
    parse_edge_list(&read(path, "--input")?).map_err(|e| CliError::input("--input", e))
}
