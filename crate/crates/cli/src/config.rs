//! Run configuration: a JSON file with an optional `problem`, an optional
//! `operator`, and a flat `params` map. `problem` and `operator` may be given
//! inline or as a path to another JSON file; matrix and vector fields accept
//! inline arrays, file paths, or small generator objects.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use fixpoint_core::metrics::{parse_matrix, read_matrix};
use fixpoint_core::operators::{affine_op, block_soft_threshold, soft_threshold};
use fixpoint_core::problems::{
    analysis_l1_problem, first_difference, gaussian_matrix, gaussian_vector, least_squares_problem,
    separable_smooth_l1_problem,
};
use fixpoint_core::{Matrix, Operator, ProblemSpec, Vector};
use serde::Deserialize;
use serde_json::Value;

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub property: Option<String>,
    pub gamma: Option<f64>,
    pub mu: Option<f64>,
    pub rho: Option<f64>,
    pub norm: Option<String>,
    pub n_pairs: Option<usize>,
    pub scales: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub beta: Option<f64>,
    pub eta: Option<f64>,
    pub lambda: Option<f64>,
    pub x0: Option<Value>,
    pub x: Option<[f64; 2]>,
    pub xhat: Option<[f64; 2]>,
    pub resolution: Option<usize>,
    pub operator: Option<String>,
    pub model: Option<String>,
    pub sandwich_mu: Option<f64>,
    /// `false` runs without a fixed point: no error column, no checks needing one.
    pub reference: Option<bool>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemConfig {
    LeastSquares {
        #[serde(rename = "A")]
        a: Value,
        b: Value,
        lambda: Option<f64>,
    },
    Separable {
        coeffs: Value,
        b: Value,
        lambda: f64,
    },
    AnalysisL1 {
        #[serde(rename = "A")]
        a: Value,
        b: Value,
        #[serde(rename = "B")]
        b_mat: Value,
        lambda: f64,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorConfig {
    Identity { dim: usize },
    Affine { alpha: f64, z: Value },
    SoftThreshold { lambda: f64, dim: usize },
    BlockSoftThreshold { lambda: f64, dim: usize },
    BoxProjection { lo: f64, hi: f64, dim: usize },
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub base: PathBuf,
    pub problem: Option<ProblemConfig>,
    pub operator: Option<OperatorConfig>,
    pub params: Params,
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let path = Path::new(p);
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

/// An inline object, or a string naming a JSON file holding one.
fn section<T: serde::de::DeserializeOwned>(value: Value, field: &str, base: &Path) -> Result<(T, PathBuf)> {
    match value {
        Value::String(p) => {
            let path = resolve(base, &p);
            let text = std::fs::read_to_string(&path).with_context(|| format!("{field}: cannot read {}", path.display()))?;
            let parsed = serde_json::from_str(&text).with_context(|| format!("{field}: invalid JSON in {}", path.display()))?;
            let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
            Ok((parsed, dir))
        }
        other => Ok((serde_json::from_value(other).with_context(|| format!("{field}: invalid section"))?, base.to_path_buf())),
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_str(&text, &base)
    }

    pub fn from_str(text: &str, base: &Path) -> Result<Self> {
        let mut root: serde_json::Map<String, Value> = match serde_json::from_str(text).context("config: invalid JSON")? {
            Value::Object(m) => m,
            _ => bail!("config: expected a JSON object"),
        };
        let problem = root.remove("problem");
        let operator = root.remove("operator");
        let params = root.remove("params");
        if let Some(k) = root.keys().next() {
            bail!("config: unknown field `{k}`, expected one of `problem`, `operator`, `params`");
        }
        let mut base_dir = base.to_path_buf();
        let problem = match problem {
            Some(v) => {
                let (p, dir) = section::<ProblemConfig>(v, "problem", base)?;
                base_dir = dir;
                Some(p)
            }
            None => None,
        };
        let operator = match operator {
            Some(v) => Some(section::<OperatorConfig>(v, "operator", base)?.0),
            None => None,
        };
        let params = match params {
            Some(v) => serde_json::from_value(v).context("params: invalid section")?,
            None => Params::default(),
        };
        Ok(Self {
            base: base_dir,
            problem,
            operator,
            params,
        })
    }
}

fn field_f64(v: &Value, field: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| anyhow!("{field}: expected a number"))
}

fn field_usize(v: &Value, field: &str) -> Result<usize> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| anyhow!("{field}: expected a nonnegative integer"))
}

/// Matrix source: rows as nested arrays, a path to the text format, or one
/// of `{"gaussian": {"rows", "cols", "seed", "scale"?}}`, `{"identity": n}`,
/// `{"first_difference": n}`, `{"zeros": [rows, cols]}`.
pub fn matrix_from(v: &Value, field: &str, base: &Path) -> Result<Matrix> {
    match v {
        Value::String(p) => read_matrix(resolve(base, p)).with_context(|| format!("{field}: cannot load matrix")),
        Value::Array(rows) => {
            let mut text = String::new();
            let ncols = rows.first().and_then(Value::as_array).map_or(0, Vec::len);
            text.push_str(&format!("{} {}\n", rows.len(), ncols));
            for (i, row) in rows.iter().enumerate() {
                let row = row.as_array().ok_or_else(|| anyhow!("{field}[{i}]: expected an array"))?;
                for (j, x) in row.iter().enumerate() {
                    text.push_str(&format!("{:e} ", field_f64(x, &format!("{field}[{i}][{j}]"))?));
                }
                text.push('\n');
            }
            parse_matrix(&text).with_context(|| format!("{field}: malformed matrix"))
        }
        Value::Object(m) if m.len() == 1 => {
            let (k, spec) = m.iter().next().expect("one entry");
            match k.as_str() {
                "gaussian" => {
                    let get = |name: &str| spec.get(name).ok_or_else(|| anyhow!("{field}.gaussian.{name}: required"));
                    let rows = field_usize(get("rows")?, &format!("{field}.gaussian.rows"))?;
                    let cols = field_usize(get("cols")?, &format!("{field}.gaussian.cols"))?;
                    let seed = field_usize(get("seed")?, &format!("{field}.gaussian.seed"))? as u64;
                    let scale = spec.get("scale").map(|s| field_f64(s, &format!("{field}.gaussian.scale"))).transpose()?;
                    Ok(gaussian_matrix(rows, cols, seed) * scale.unwrap_or(1.0))
                }
                "identity" => {
                    let n = field_usize(spec, &format!("{field}.identity"))?;
                    Ok(Matrix::identity(n, n))
                }
                "first_difference" => Ok(first_difference(field_usize(spec, &format!("{field}.first_difference"))?)),
                "zeros" => {
                    let dims = spec.as_array().filter(|a| a.len() == 2).ok_or_else(|| anyhow!("{field}.zeros: expected [rows, cols]"))?;
                    Ok(Matrix::zeros(
                        field_usize(&dims[0], &format!("{field}.zeros[0]"))?,
                        field_usize(&dims[1], &format!("{field}.zeros[1]"))?,
                    ))
                }
                other => bail!("{field}: unknown matrix generator `{other}`"),
            }
        }
        _ => bail!("{field}: expected rows, a path, or a generator object"),
    }
}

/// Vector source: an array, a path to whitespace- or comma-separated
/// numbers, or `{"gaussian": {"len", "seed", "scale"?}}`, `{"zeros": n}`,
/// `{"constant": {"len", "value"}}`.
pub fn vector_from(v: &Value, field: &str, base: &Path) -> Result<Vector> {
    match v {
        Value::String(p) => {
            let path = resolve(base, p);
            let text = std::fs::read_to_string(&path).with_context(|| format!("{field}: cannot read {}", path.display()))?;
            let vals = text
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<f64>().map_err(|_| anyhow!("{field}: bad number `{t}`")))
                .collect::<Result<Vec<_>>>()?;
            Ok(Vector::from_vec(vals))
        }
        Value::Array(xs) => Ok(Vector::from_vec(
            xs.iter()
                .enumerate()
                .map(|(i, x)| field_f64(x, &format!("{field}[{i}]")))
                .collect::<Result<_>>()?,
        )),
        Value::Object(m) if m.len() == 1 => {
            let (k, spec) = m.iter().next().expect("one entry");
            let get = |name: &str| spec.get(name).ok_or_else(|| anyhow!("{field}.{k}.{name}: required"));
            match k.as_str() {
                "gaussian" => {
                    let len = field_usize(get("len")?, &format!("{field}.gaussian.len"))?;
                    let seed = field_usize(get("seed")?, &format!("{field}.gaussian.seed"))? as u64;
                    let scale = spec.get("scale").map(|s| field_f64(s, &format!("{field}.gaussian.scale"))).transpose()?;
                    Ok(gaussian_vector(len, seed) * scale.unwrap_or(1.0))
                }
                "zeros" => Ok(Vector::zeros(field_usize(spec, &format!("{field}.zeros"))?)),
                "constant" => {
                    let len = field_usize(get("len")?, &format!("{field}.constant.len"))?;
                    let value = field_f64(get("value")?, &format!("{field}.constant.value"))?;
                    Ok(Vector::repeat(len, value))
                }
                other => bail!("{field}: unknown vector generator `{other}`"),
            }
        }
        _ => bail!("{field}: expected an array, a path, or a generator object"),
    }
}

impl ProblemConfig {
    /// Builds the problem; `lambda` overrides the configured weight.
    pub fn build(&self, base: &Path, lambda: Option<f64>) -> Result<ProblemSpec> {
        match self {
            ProblemConfig::LeastSquares { a, b, lambda: l } => {
                let a = matrix_from(a, "problem.A", base)?;
                let b = vector_from(b, "problem.b", base)?;
                let p = least_squares_problem(&a, &b).context("problem: least squares")?;
                match lambda.or(*l) {
                    Some(l) => p.with_l1_penalty(l).context("problem.lambda"),
                    None => Ok(p),
                }
            }
            ProblemConfig::Separable { coeffs, b, lambda: l } => {
                let c = vector_from(coeffs, "problem.coeffs", base)?;
                let b = vector_from(b, "problem.b", base)?;
                separable_smooth_l1_problem(&c, &b, lambda.unwrap_or(*l)).context("problem: separable")
            }
            ProblemConfig::AnalysisL1 { a, b, b_mat, lambda: l } => {
                let a = matrix_from(a, "problem.A", base)?;
                let b = vector_from(b, "problem.b", base)?;
                let bm = matrix_from(b_mat, "problem.B", base)?;
                analysis_l1_problem(&a, &b, &bm, lambda.unwrap_or(*l)).context("problem: analysis_l1")
            }
        }
    }
}

impl OperatorConfig {
    pub fn build(&self, base: &Path, lambda: Option<f64>) -> Result<Operator> {
        let nonneg = |l: f64| {
            if l >= 0.0 {
                Ok(l)
            } else {
                Err(anyhow!("operator.lambda: must be nonnegative, got {l}"))
            }
        };
        let op = match self {
            OperatorConfig::Identity { dim } => Operator::identity(*dim).with_fixed_point_hint(Vector::zeros(*dim))?,
            OperatorConfig::Affine { alpha, z } => affine_op(*alpha, vector_from(z, "operator.z", base)?),
            OperatorConfig::SoftThreshold { lambda: l, dim } => {
                let l = nonneg(lambda.unwrap_or(*l))?;
                Operator::new(*dim, format!("soft_threshold[{l}]"), move |x: &Vector| soft_threshold(l, x))
                    .with_fixed_point_hint(Vector::zeros(*dim))?
            }
            OperatorConfig::BlockSoftThreshold { lambda: l, dim } => {
                let l = nonneg(lambda.unwrap_or(*l))?;
                Operator::new(*dim, format!("block_soft_threshold[{l}]"), move |x: &Vector| {
                    block_soft_threshold(l, x)
                })
                .with_fixed_point_hint(Vector::zeros(*dim))?
            }
            OperatorConfig::BoxProjection { lo, hi, dim } => {
                if !(lo <= hi) {
                    bail!("operator: box_projection needs lo <= hi (lo={lo}, hi={hi})");
                }
                let (lo, hi) = (*lo, *hi);
                Operator::new(*dim, format!("box[{lo},{hi}]"), move |x: &Vector| x.map(|t| t.clamp(lo, hi)))
                    .with_fixed_point_hint(Vector::repeat(*dim, 0f64.clamp(lo, hi)))?
            }
        };
        if op.dim() == 0 {
            bail!("operator.dim: must be positive");
        }
        Ok(op)
    }
}
