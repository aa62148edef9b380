//! Named analytic graphon families, their spec strings and discretization.

use std::fmt;
use std::str::FromStr;

use crate::constructions::{appendix_graphon, appendix_value, AppendixSpec};
use crate::error::{GraphonError, Result};
use crate::graphon::{uniform_boundaries, Kernel, StepGraphon};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticGraphon {
    /// `w(x, y) = min{x, y}`
    Min,
    Constant(f64),
    /// `b` on `[0, α]²`, `a` elsewhere.
    TwoBlock { a: f64, b: f64, alpha: f64 },
    /// `1` on `[0, δ]²`, `0` elsewhere.
    LowerExtremal(f64),
    /// `1` where `max{x, y} ≥ 1 - δ`, `0` elsewhere.
    UpperExtremal(f64),
    /// The alternating-peeling construction truncated at depth `N`.
    Appendix(usize),
}

fn closed_unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(GraphonError::BadParameter(format!("{name} = {v} is outside [0, 1]")))
    }
}

fn open_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(GraphonError::BadParameter(format!("{name} = {v} is outside (0, 1)")))
    }
}

impl AnalyticGraphon {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Min => Ok(()),
            Self::Constant(a) => closed_unit("a", a),
            Self::TwoBlock { a, b, alpha } => {
                closed_unit("a", a)?;
                closed_unit("b", b)?;
                open_unit("alpha", alpha)
            }
            Self::LowerExtremal(d) | Self::UpperExtremal(d) => open_unit("delta", d),
            Self::Appendix(n) if n < 4 => Err(GraphonError::BadDepth(n)),
            Self::Appendix(_) => Ok(()),
        }
    }

    /// The exact step representation, for every family except `Min`.
    pub fn native_step(&self) -> Result<Option<StepGraphon>> {
        self.validate()?;
        let g = match *self {
            Self::Min => return Ok(None),
            Self::Constant(a) => StepGraphon::constant(a)?,
            Self::TwoBlock { a, b, alpha } => {
                StepGraphon::new(vec![0.0, alpha, 1.0], vec![vec![b, a], vec![a, a]])?
            }
            Self::LowerExtremal(d) => {
                StepGraphon::new(vec![0.0, d, 1.0], vec![vec![1.0, 0.0], vec![0.0, 0.0]])?
            }
            Self::UpperExtremal(d) => {
                StepGraphon::new(vec![0.0, 1.0 - d, 1.0], vec![vec![0.0, 1.0], vec![1.0, 1.0]])?
            }
            Self::Appendix(n) => appendix_graphon(&AppendixSpec::new(n)?),
        };
        Ok(Some(g))
    }

    /// Block averages on the uniform `m`-partition, from closed forms.
    pub fn discretize(&self, m: usize) -> Result<StepGraphon> {
        self.validate()?;
        if m == 0 {
            return Err(GraphonError::BadGrid("block count must be at least 1".into()));
        }
        if let Self::Appendix(n) = *self {
            let (g, _) = appendix_graphon(&AppendixSpec::new(n)?).resample_uniform(m)?;
            return Ok(g);
        }
        let grid = uniform_boundaries(m);
        let mut values = vec![vec![0.0; m]; m];
        for i in 0..m {
            for j in i..m {
                let v = self
                    .block_average(grid[i], grid[i + 1], grid[j], grid[j + 1])
                    .clamp(0.0, 1.0);
                values[i][j] = v;
                values[j][i] = v;
            }
        }
        StepGraphon::new(grid, values)
    }

    /// Mean of the kernel over `[x0, x1] × [y0, y1]`.
    fn block_average(&self, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
        let area = (x1 - x0) * (y1 - y0);
        let overlap = |lo: f64, hi: f64, a: f64, b: f64| (hi.min(b) - lo.max(a)).max(0.0);
        match *self {
            Self::Min => min_block_average(x0, x1, y0, y1),
            Self::Constant(a) => a,
            Self::TwoBlock { a, b, alpha } => {
                let inner = overlap(x0, x1, 0.0, alpha) * overlap(y0, y1, 0.0, alpha);
                a + (b - a) * inner / area
            }
            Self::LowerExtremal(d) => overlap(x0, x1, 0.0, d) * overlap(y0, y1, 0.0, d) / area,
            Self::UpperExtremal(d) => {
                let low = 1.0 - d;
                1.0 - overlap(x0, x1, 0.0, low) * overlap(y0, y1, 0.0, low) / area
            }
            Self::Appendix(_) => unreachable!("appendix is averaged from its step form"),
        }
    }
}

fn min_block_average(x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    if x1 <= y0 {
        return 0.5 * (x0 + x1);
    }
    if y1 <= x0 {
        return 0.5 * (y0 + y1);
    }
    if x0 == y0 && x1 == y1 {
        return x0 + (x1 - x0) / 3.0;
    }
    // F(x, y) = ∫₀ˣ∫₀ʸ min = s²t/2 - s³/6 with s = min, t = max
    let f = |x: f64, y: f64| {
        let (s, t) = if x < y { (x, y) } else { (y, x) };
        s * s * t / 2.0 - s * s * s / 6.0
    };
    let integral = f(x1, y1) - f(x0, y1) - f(x1, y0) + f(x0, y0);
    integral / ((x1 - x0) * (y1 - y0))
}

impl Kernel for AnalyticGraphon {
    fn value(&self, x: f64, y: f64) -> f64 {
        match *self {
            Self::Min => x.min(y),
            Self::Constant(a) => a,
            Self::TwoBlock { a, b, alpha } => {
                if x <= alpha && y <= alpha {
                    b
                } else {
                    a
                }
            }
            Self::LowerExtremal(d) => {
                if x <= d && y <= d {
                    1.0
                } else {
                    0.0
                }
            }
            Self::UpperExtremal(d) => {
                if x.max(y) >= 1.0 - d {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Appendix(n) => match AppendixSpec::new(n) {
                Ok(spec) => appendix_value(&spec, x, y),
                Err(_) => 0.0,
            },
        }
    }
}

impl FromStr for AnalyticGraphon {
    type Err = GraphonError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = match s.split_once(':') {
            Some((n, a)) => (n, a),
            None => (s, ""),
        };
        let reals = |expected: usize| -> Result<Vec<f64>> {
            let parts: Vec<&str> = args.split(',').map(str::trim).collect();
            if args.is_empty() || parts.len() != expected {
                return Err(GraphonError::Parse(format!(
                    "'{name}' expects {expected} comma-separated parameter(s), got '{args}'"
                )));
            }
            parts
                .iter()
                .map(|p| {
                    p.parse::<f64>()
                        .map_err(|_| GraphonError::Parse(format!("'{p}' is not a number")))
                })
                .collect()
        };
        let g = match name {
            "min" if args.is_empty() => Self::Min,
            "min" => return Err(GraphonError::Parse("'min' takes no parameters".into())),
            "const" => Self::Constant(reals(1)?[0]),
            "twoblock" => {
                let p = reals(3)?;
                Self::TwoBlock {
                    a: p[0],
                    b: p[1],
                    alpha: p[2],
                }
            }
            "lower" => Self::LowerExtremal(reals(1)?[0]),
            "upper" => Self::UpperExtremal(reals(1)?[0]),
            "appendix" => Self::Appendix(
                args.trim()
                    .parse()
                    .map_err(|_| GraphonError::Parse(format!("'{args}' is not a depth")))?,
            ),
            other => {
                return Err(GraphonError::Parse(format!("unknown graphon family '{other}'")))
            }
        };
        g.validate()?;
        Ok(g)
    }
}

impl fmt::Display for AnalyticGraphon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Min => write!(f, "min"),
            Self::Constant(a) => write!(f, "const:{a}"),
            Self::TwoBlock { a, b, alpha } => write!(f, "twoblock:{a},{b},{alpha}"),
            Self::LowerExtremal(d) => write!(f, "lower:{d}"),
            Self::UpperExtremal(d) => write!(f, "upper:{d}"),
            Self::Appendix(n) => write!(f, "appendix:{n}"),
        }
    }
}
