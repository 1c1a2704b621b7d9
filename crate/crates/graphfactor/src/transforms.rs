//! Element-wise transforms that turn a base statistic (A, J, or Q) into
//! the matrix handed to the factorization, and the fixed evaluation menu.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matrices::{check_dense_cap, j_matrix, q_matrix, HyperParams, JIndex};

pub const RECIPE_TOKENS: [&str; 8] = [
    "a",
    "sig_a",
    "j",
    "sig_j",
    "q",
    "sig_q",
    "trunc_log_q",
    "sig_log_q",
];

/// (sigmoid recipe, the recipe it is compared against) for the
/// sigmoid-effect study. sig_log_q pairs with trunc_log_q: the sigmoid is
/// applied to the untruncated log, so the truncated variant is its
/// untransformed counterpart in the menu.
pub const SIGMOID_PAIRS: [(&str, &str); 4] = [
    ("sig_a", "a"),
    ("sig_j", "j"),
    ("sig_q", "q"),
    ("sig_log_q", "trunc_log_q"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Base {
    /// Adjacency matrix A.
    Adjacency,
    /// Window co-occurrence joint probability J.
    Joint,
    /// Shifted-PMI argument Q.
    Q,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transform {
    /// x
    Identity,
    /// log(max(x, 1)); zeroes out every entry below 1.
    TruncLog,
    /// sigma(log x), computed algebraically as x/(1+x) so x=0 gives 0 and no
    /// -inf is ever materialized.
    SigmoidLog,
    /// exp(log x) = x with the convention 0 -> 0; a plain copy.
    ExpLog,
    /// sigma(exp(log x)) = sigma(x).
    SigmoidExpLog,
    /// sigma(x) = 1/(1+e^(-x)).
    Sigmoid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MatrixRecipe {
    pub base: Base,
    pub transform: Transform,
}

impl MatrixRecipe {
    pub const fn new(base: Base, transform: Transform) -> Self {
        MatrixRecipe { base, transform }
    }

    /// The stable CLI token for this recipe.
    pub fn token(&self) -> &'static str {
        match (self.base, self.transform) {
            (Base::Adjacency, Transform::Identity) => "a",
            (Base::Adjacency, Transform::Sigmoid) => "sig_a",
            (Base::Joint, Transform::Identity) => "j",
            (Base::Joint, Transform::Sigmoid) => "sig_j",
            (Base::Q, Transform::ExpLog) => "q",
            (Base::Q, Transform::SigmoidExpLog) => "sig_q",
            (Base::Q, Transform::TruncLog) => "trunc_log_q",
            (Base::Q, Transform::SigmoidLog) => "sig_log_q",
            _ => unreachable!("recipe outside the menu has no token"),
        }
    }

    pub fn from_token(token: &str) -> Result<Self> {
        let r = match token {
            "a" => Self::new(Base::Adjacency, Transform::Identity),
            "sig_a" => Self::new(Base::Adjacency, Transform::Sigmoid),
            "j" => Self::new(Base::Joint, Transform::Identity),
            "sig_j" => Self::new(Base::Joint, Transform::Sigmoid),
            "q" => Self::new(Base::Q, Transform::ExpLog),
            "sig_q" => Self::new(Base::Q, Transform::SigmoidExpLog),
            "trunc_log_q" => Self::new(Base::Q, Transform::TruncLog),
            "sig_log_q" => Self::new(Base::Q, Transform::SigmoidLog),
            _ => {
                return Err(Error::UnknownRecipe {
                    token: token.to_string(),
                    valid: RECIPE_TOKENS.join(", "),
                })
            }
        };
        Ok(r)
    }

    /// Log-family transforms are only defined for the nonnegative Q.
    pub fn validate(&self) -> Result<()> {
        let ok = match self.transform {
            Transform::Identity | Transform::Sigmoid => true,
            Transform::TruncLog
            | Transform::SigmoidLog
            | Transform::ExpLog
            | Transform::SigmoidExpLog => self.base == Base::Q,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidRecipe(format!("{:?}", self)))
        }
    }
}

/// The full evaluation menu, in CLI token order.
pub fn recipe_menu() -> Vec<MatrixRecipe> {
    RECIPE_TOKENS
        .iter()
        .map(|t| MatrixRecipe::from_token(t).unwrap())
        .collect()
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub fn apply_recipe(m: &DenseMatrix, r: &MatrixRecipe) -> Result<DenseMatrix> {
    let mut out = m.clone();
    apply_recipe_in_place(&mut out, r)?;
    Ok(out)
}

/// Computes a recipe's matrix directly from a graph: base statistic, then
/// element-wise transform.
pub fn recipe_matrix(
    g: &Graph,
    r: &MatrixRecipe,
    h: &HyperParams,
    j_index: JIndex,
    cap: usize,
) -> Result<DenseMatrix> {
    r.validate()?;
    let mut base = match r.base {
        Base::Adjacency => {
            check_dense_cap(g.n(), cap)?;
            g.adjacency().to_dense()
        }
        Base::Joint => j_matrix(g, h, j_index, cap)?,
        Base::Q => q_matrix(g, h, cap)?,
    };
    apply_recipe_in_place(&mut base, r)?;
    Ok(base)
}

pub fn apply_recipe_in_place(m: &mut DenseMatrix, r: &MatrixRecipe) -> Result<()> {
    r.validate()?;
    if r.base == Base::Q {
        if let Some(pos) = m.data().iter().position(|&v| v < 0.0) {
            let (row, col) = (pos / m.n_cols(), pos % m.n_cols());
            return Err(Error::NegativeEntry {
                row,
                col,
                value: m.get(row, col),
            });
        }
    }
    match r.transform {
        Transform::Identity | Transform::ExpLog => {}
        Transform::TruncLog => m.map_in_place(|x| if x > 1.0 { x.ln() } else { 0.0 }),
        Transform::SigmoidLog => m.map_in_place(|x| x / (1.0 + x)),
        Transform::Sigmoid | Transform::SigmoidExpLog => m.map_in_place(sigmoid),
    }
    Ok(())
}
