//! Temperature-dependent layer coefficients.
//!
//! Every property is a polynomial in the temperature `u`. Conductivities at
//! half nodes are taken at the mean of the two endpoint temperatures, never
//! as the mean of two conductivities.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{half, Scalar};

/// Polynomial with coefficients in increasing powers: `c0 + c1 u + c2 u^2 ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial(Vec<f64>);

impl Polynomial {
    pub fn new(coefficients: Vec<f64>) -> Self {
        let mut coefficients = coefficients;
        while coefficients.len() > 1 && coefficients.last() == Some(&0.0) {
            coefficients.pop();
        }
        if coefficients.is_empty() {
            coefficients.push(0.0);
        }
        Self(coefficients)
    }

    pub fn constant(value: f64) -> Self {
        Self(vec![value])
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    pub fn eval<T: Scalar>(&self, u: &T) -> T {
        self.0
            .iter()
            .rev()
            .fold(T::zero(), |acc, &c| acc * u.clone() + T::from_f64_exact(c))
    }

    pub fn derivative(&self) -> Polynomial {
        if self.0.len() == 1 {
            return Polynomial::constant(0.0);
        }
        Polynomial::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialModel {
    pub rho: Polynomial,
    pub cv: Polynomial,
    pub lambda: Polynomial,
    #[serde(default = "zero_polynomial")]
    pub phi: Polynomial,
    /// Closed temperature interval on which the model may be evaluated.
    #[serde(default = "unbounded")]
    pub valid_range: (f64, f64),
}

fn zero_polynomial() -> Polynomial {
    Polynomial::constant(0.0)
}

fn unbounded() -> (f64, f64) {
    (f64::NEG_INFINITY, f64::INFINITY)
}

/// Coefficients frozen at one node for one implicit level.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSample<T> {
    /// `ρ(u_i) c_v(u_i)`.
    pub rho_c: T,
    /// `λ((u_i + u_{i-1}) / 2)`.
    pub lambda_half_minus: T,
    /// `λ((u_i + u_{i+1}) / 2)`.
    pub lambda_half_plus: T,
    pub phi: T,
}

impl MaterialModel {
    /// Constant coefficients over the whole real line.
    pub fn constant(rho: f64, cv: f64, lambda: f64, phi: f64) -> Self {
        Self {
            rho: Polynomial::constant(rho),
            cv: Polynomial::constant(cv),
            lambda: Polynomial::constant(lambda),
            phi: Polynomial::constant(phi),
            valid_range: unbounded(),
        }
    }

    pub fn with_range(mut self, lo: f64, hi: f64) -> Self {
        self.valid_range = (lo, hi);
        self
    }

    /// True when no coefficient depends on the temperature.
    pub fn is_linear(&self) -> bool {
        self.rho.is_constant() && self.cv.is_constant() && self.lambda.is_constant() && self.phi.is_constant()
    }

    pub fn check_range<T: Scalar>(&self, u: &T) -> Result<()> {
        let v = u.to_f64_lossy();
        let (lo, hi) = self.valid_range;
        if v.is_nan() || v < lo || v > hi {
            return Err(Error::Domain(format!(
                "temperature {v} outside validity range [{lo}, {hi}]"
            )));
        }
        Ok(())
    }

    /// Conductivity at temperature `u`, range- and sign-checked.
    pub fn conductivity<T: Scalar>(&self, u: &T) -> Result<T> {
        self.check_range(u)?;
        positive("lambda", self.lambda.eval(u))
    }

    pub fn sample<T: Scalar>(&self, u_i: &T, u_im1: &T, u_ip1: &T) -> Result<CoefficientSample<T>> {
        self.check_range(u_i)?;
        self.check_range(u_im1)?;
        self.check_range(u_ip1)?;
        let rho = positive("rho", self.rho.eval(u_i))?;
        let cv = positive("cv", self.cv.eval(u_i))?;
        let minus = (u_i.clone() + u_im1.clone()) * half::<T>();
        let plus = (u_i.clone() + u_ip1.clone()) * half::<T>();
        Ok(CoefficientSample {
            rho_c: rho * cv,
            lambda_half_minus: positive("lambda", self.lambda.eval(&minus))?,
            lambda_half_plus: positive("lambda", self.lambda.eval(&plus))?,
            phi: self.phi.eval(u_i),
        })
    }
}

/// Free-function form of [`MaterialModel::sample`].
pub fn sample<T: Scalar>(model: &MaterialModel, u_i: &T, u_im1: &T, u_ip1: &T) -> Result<CoefficientSample<T>> {
    model.sample(u_i, u_im1, u_ip1)
}

fn positive<T: Scalar>(name: &str, value: T) -> Result<T> {
    if value > T::zero() {
        Ok(value)
    } else {
        Err(Error::Domain(format!(
            "{name} must be positive, evaluated to {}",
            value.to_f64_lossy()
        )))
    }
}

/// Named material models, looked up by the layer's `material_id`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MaterialSet(BTreeMap<String, MaterialModel>);

impl MaterialSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: impl Into<String>, model: MaterialModel) -> &mut Self {
        self.0.insert(id.into(), model);
        self
    }

    pub fn with(mut self, id: impl Into<String>, model: MaterialModel) -> Self {
        self.insert(id, model);
        self
    }

    pub fn get(&self, id: &str) -> Result<&MaterialModel> {
        self.0
            .get(id)
            .ok_or_else(|| Error::Config(format!("unknown material '{id}'")))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &MaterialModel)> {
        self.0.iter()
    }

    pub fn is_linear(&self) -> bool {
        self.0.values().all(MaterialModel::is_linear)
    }
}
