//! Fields on a chart, evaluated through jets.
//!
//! A field is a chart plus a closure from coordinate jets to component jets.
//! The closure never inspects the jets' variable space, only their count, so
//! the same base-field closure can be called with seeds living in a larger
//! space — this is how metrics and scalars lift to the cone chart for free.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::jet::Jet;

/// Dense valence-`k` array of jets over an `n`-dimensional chart.
#[derive(Clone, Debug)]
pub struct JetTensor {
    pub n: usize,
    pub valence: usize,
    pub data: Vec<Jet>,
}

impl JetTensor {
    pub fn from_fn(
        n: usize,
        valence: usize,
        mut f: impl FnMut(&[usize]) -> Result<Jet>,
    ) -> Result<JetTensor> {
        let len = n.pow(valence as u32);
        let mut data = Vec::with_capacity(len);
        let mut idx = vec![0usize; valence];
        for flat in 0..len {
            unflatten(flat, n, &mut idx);
            data.push(f(&idx)?);
        }
        Ok(JetTensor { n, valence, data })
    }

    pub fn get(&self, idx: &[usize]) -> &Jet {
        &self.data[flatten(idx, self.n)]
    }

    pub fn values(&self) -> TensorData {
        TensorData {
            n: self.n,
            valence: self.valence,
            data: self.data.iter().map(|j| j.value()).collect(),
        }
    }

    pub fn min_order(&self) -> u8 {
        self.data.iter().map(|j| j.order()).min().unwrap_or(0)
    }
}

/// Dense valence-`k` array of plain values.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorData {
    pub n: usize,
    pub valence: usize,
    pub data: Vec<f64>,
}

impl TensorData {
    pub fn zeros(n: usize, valence: usize) -> TensorData {
        TensorData {
            n,
            valence,
            data: vec![0.0; n.pow(valence as u32)],
        }
    }

    pub fn from_fn(n: usize, valence: usize, mut f: impl FnMut(&[usize]) -> f64) -> TensorData {
        let len = n.pow(valence as u32);
        let mut data = Vec::with_capacity(len);
        let mut idx = vec![0usize; valence];
        for flat in 0..len {
            unflatten(flat, n, &mut idx);
            data.push(f(&idx));
        }
        TensorData { n, valence, data }
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[flatten(idx, self.n)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        self.data[flatten(idx, self.n)] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sub(&self, rhs: &TensorData) -> TensorData {
        assert_eq!(self.data.len(), rhs.data.len());
        TensorData {
            n: self.n,
            valence: self.valence,
            data: self
                .data
                .iter()
                .zip(rhs.data.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> TensorData {
        TensorData {
            n: self.n,
            valence: self.valence,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn add(&self, rhs: &TensorData) -> TensorData {
        assert_eq!(self.data.len(), rhs.data.len());
        TensorData {
            n: self.n,
            valence: self.valence,
            data: self
                .data
                .iter()
                .zip(rhs.data.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

fn flatten(idx: &[usize], n: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n + i)
}

fn unflatten(mut flat: usize, n: usize, idx: &mut [usize]) {
    for slot in idx.iter_mut().rev() {
        *slot = flat % n;
        flat /= n;
    }
}

pub type ScalarFn = Arc<dyn Fn(&[Jet]) -> Result<Jet> + Send + Sync>;
pub type MatrixFn = Arc<dyn Fn(&[Jet]) -> Result<Vec<Vec<Jet>>> + Send + Sync>;
pub type TensorFn = Arc<dyn Fn(&[Jet]) -> Result<JetTensor> + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(&[Jet]) -> Result<Vec<Jet>> + Send + Sync>;

/// Scalar field evaluated through jets.
#[derive(Clone)]
pub struct ScalarField {
    chart: Chart,
    eval: ScalarFn,
}

impl ScalarField {
    pub fn new(
        chart: Chart,
        eval: impl Fn(&[Jet]) -> Result<Jet> + Send + Sync + 'static,
    ) -> ScalarField {
        ScalarField {
            chart,
            eval: Arc::new(eval),
        }
    }

    pub fn constant(chart: Chart, value: f64) -> ScalarField {
        ScalarField::new(chart, move |seeds| {
            Ok(Jet::constant(value, seeds[0].dim()))
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    /// Evaluate on caller-provided seeds (cone lifting entry point).
    pub fn eval_jets(&self, seeds: &[Jet]) -> Result<Jet> {
        if seeds.len() != self.chart.dim() {
            return Err(Error::Argument(format!(
                "{} seeds passed to a field on the {}-dimensional chart {}",
                seeds.len(),
                self.chart.dim(),
                self.chart.name()
            )));
        }
        (self.eval)(seeds)
    }

    pub fn jet_at(&self, p: &[f64]) -> Result<Jet> {
        let seeds = self.chart.seeds_at(p)?;
        self.eval_jets(&seeds)
    }

    pub fn value_at(&self, p: &[f64]) -> Result<f64> {
        Ok(self.jet_at(p)?.value())
    }

    /// Pointwise linear combination `a*self + b*rhs`.
    pub fn combine(&self, a: f64, rhs: &ScalarField, b: f64) -> ScalarField {
        let f = self.eval.clone();
        let g = rhs.eval.clone();
        ScalarField::new(self.chart.clone(), move |seeds| {
            f(seeds)?.scale(a).add(&g(seeds)?.scale(b))
        })
    }
}

/// Metric tensor field with a declared signature `(p, q)`.
#[derive(Clone)]
pub struct MetricField {
    chart: Chart,
    components: MatrixFn,
    signature: (usize, usize),
}

impl MetricField {
    pub fn new(
        chart: Chart,
        signature: (usize, usize),
        components: impl Fn(&[Jet]) -> Result<Vec<Vec<Jet>>> + Send + Sync + 'static,
    ) -> MetricField {
        MetricField {
            chart,
            components: Arc::new(components),
            signature,
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn eval_jets(&self, seeds: &[Jet]) -> Result<Vec<Vec<Jet>>> {
        if seeds.len() != self.chart.dim() {
            return Err(Error::Argument(format!(
                "{} seeds passed to a metric on the {}-dimensional chart {}",
                seeds.len(),
                self.chart.dim(),
                self.chart.name()
            )));
        }
        (self.components)(seeds)
    }

    pub fn jets_at(&self, p: &[f64]) -> Result<Vec<Vec<Jet>>> {
        let seeds = self.chart.seeds_at(p)?;
        self.eval_jets(&seeds)
    }

    /// Component matrix values at a point.
    pub fn matrix_at(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let jets = self.jets_at(p)?;
        let n = jets.len();
        Ok(DMatrix::from_fn(n, n, |i, j| jets[i][j].value()))
    }

    /// Metric scaled by a nonzero constant; negative constants flip the
    /// signature.
    pub fn scaled(&self, c: f64) -> Result<MetricField> {
        if c == 0.0 {
            return Err(Error::Argument("metric scaled by zero".to_string()));
        }
        let inner = self.components.clone();
        let signature = if c > 0.0 {
            self.signature
        } else {
            (self.signature.1, self.signature.0)
        };
        Ok(MetricField {
            chart: self.chart.clone(),
            components: Arc::new(move |seeds: &[Jet]| {
                let m = inner(seeds)?;
                Ok(m.into_iter()
                    .map(|row| row.into_iter().map(|j| j.scale(c)).collect())
                    .collect())
            }),
            signature,
        })
    }
}

/// Covariant tensor field of valence `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    None,
    Symmetric,
}

#[derive(Clone)]
pub struct TensorField {
    chart: Chart,
    valence: usize,
    components: TensorFn,
    symmetry: Symmetry,
}

impl TensorField {
    pub fn new(
        chart: Chart,
        valence: usize,
        symmetry: Symmetry,
        components: impl Fn(&[Jet]) -> Result<JetTensor> + Send + Sync + 'static,
    ) -> TensorField {
        TensorField {
            chart,
            valence,
            components: Arc::new(components),
            symmetry,
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn valence(&self) -> usize {
        self.valence
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn eval_jets(&self, seeds: &[Jet]) -> Result<JetTensor> {
        if seeds.len() != self.chart.dim() {
            return Err(Error::Argument(format!(
                "{} seeds passed to a tensor field on the {}-dimensional chart {}",
                seeds.len(),
                self.chart.dim(),
                self.chart.name()
            )));
        }
        let t = (self.components)(seeds)?;
        if t.valence != self.valence || t.n != self.chart.dim() {
            return Err(Error::Argument(
                "tensor closure returned mismatched shape".to_string(),
            ));
        }
        Ok(t)
    }

    pub fn jets_at(&self, p: &[f64]) -> Result<JetTensor> {
        let seeds = self.chart.seeds_at(p)?;
        self.eval_jets(&seeds)
    }

    pub fn values_at(&self, p: &[f64]) -> Result<TensorData> {
        Ok(self.jets_at(p)?.values())
    }

    /// Valence-2 component matrix values.
    pub fn matrix_at(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        if self.valence != 2 {
            return Err(Error::Argument(format!(
                "matrix_at on a valence-{} tensor",
                self.valence
            )));
        }
        let t = self.values_at(p)?;
        Ok(DMatrix::from_fn(t.n, t.n, |i, j| t.get(&[i, j])))
    }

    /// Worst symmetry defect over a point sample (symmetric-tagged fields).
    pub fn symmetry_defect(&self, points: &[Vec<f64>]) -> Result<f64> {
        if self.valence != 2 {
            return Ok(0.0);
        }
        let mut worst = 0.0_f64;
        for p in points {
            let t = self.values_at(p)?;
            for i in 0..t.n {
                for j in 0..i {
                    worst = worst.max((t.get(&[i, j]) - t.get(&[j, i])).abs());
                }
            }
        }
        Ok(worst)
    }

    /// Metric as a plain valence-2 tensor field.
    pub fn from_metric(g: &MetricField) -> TensorField {
        let inner = g.clone();
        TensorField::new(
            g.chart().clone(),
            2,
            Symmetry::Symmetric,
            move |seeds: &[Jet]| {
                let m = inner.eval_jets(seeds)?;
                JetTensor::from_fn(m.len(), 2, |idx| Ok(m[idx[0]][idx[1]].clone()))
            },
        )
    }

    /// Pointwise linear combination `a*self + b*rhs`.
    pub fn combine(&self, a: f64, rhs: &TensorField, b: f64) -> Result<TensorField> {
        if self.valence != rhs.valence {
            return Err(Error::Argument(
                "combining tensors of different valence".to_string(),
            ));
        }
        let f = self.components.clone();
        let g = rhs.components.clone();
        let symmetry = if self.symmetry == rhs.symmetry {
            self.symmetry
        } else {
            Symmetry::None
        };
        Ok(TensorField::new(
            self.chart.clone(),
            self.valence,
            symmetry,
            move |seeds: &[Jet]| {
                let ta = f(seeds)?;
                let tb = g(seeds)?;
                JetTensor::from_fn(ta.n, ta.valence, |idx| {
                    ta.get(idx).scale(a).add(&tb.get(idx).scale(b))
                })
            },
        ))
    }
}

/// Vector field (contravariant components).
#[derive(Clone)]
pub struct VectorFieldOnChart {
    chart: Chart,
    components: VectorFn,
}

impl VectorFieldOnChart {
    pub fn new(
        chart: Chart,
        components: impl Fn(&[Jet]) -> Result<Vec<Jet>> + Send + Sync + 'static,
    ) -> VectorFieldOnChart {
        VectorFieldOnChart {
            chart,
            components: Arc::new(components),
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn eval_jets(&self, seeds: &[Jet]) -> Result<Vec<Jet>> {
        if seeds.len() != self.chart.dim() {
            return Err(Error::Argument(format!(
                "{} seeds passed to a vector field on the {}-dimensional chart {}",
                seeds.len(),
                self.chart.dim(),
                self.chart.name()
            )));
        }
        (self.components)(seeds)
    }

    pub fn jets_at(&self, p: &[f64]) -> Result<Vec<Jet>> {
        let seeds = self.chart.seeds_at(p)?;
        self.eval_jets(&seeds)
    }

    pub fn values_at(&self, p: &[f64]) -> Result<Vec<f64>> {
        Ok(self.jets_at(p)?.iter().map(|j| j.value()).collect())
    }

    /// Pointwise linear combination `a*self + b*rhs`.
    pub fn combine(&self, a: f64, rhs: &VectorFieldOnChart, b: f64) -> VectorFieldOnChart {
        let f = self.components.clone();
        let g = rhs.components.clone();
        VectorFieldOnChart::new(self.chart.clone(), move |seeds: &[Jet]| {
            let va = f(seeds)?;
            let vb = g(seeds)?;
            va.iter()
                .zip(vb.iter())
                .map(|(x, y)| x.scale(a).add(&y.scale(b)))
                .collect()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_field_deterministic_and_domain_guarded() {
        let chart = Chart::boxed("line", vec![(-1.0, 1.0)]);
        let f = ScalarField::new(chart, |seeds| seeds[0].mul(&seeds[0]));
        let a = f.jet_at(&[0.5]).unwrap();
        let b = f.jet_at(&[0.5]).unwrap();
        assert_eq!(a.coeffs(), b.coeffs());
        assert!(f.jet_at(&[100.0]).is_err());
    }

    #[test]
    fn metric_scaling_flips_signature() {
        let chart = Chart::boxed("plane", vec![(-1.0, 1.0), (-1.0, 1.0)]);
        let g = MetricField::new(chart, (2, 0), |seeds| {
            let dim = seeds[0].dim();
            Ok(vec![
                vec![Jet::constant(1.0, dim), Jet::constant(0.0, dim)],
                vec![Jet::constant(0.0, dim), Jet::constant(1.0, dim)],
            ])
        });
        let flipped = g.scaled(-1.0).unwrap();
        assert_eq!(flipped.signature(), (0, 2));
        assert_eq!(g.scaled(4.0).unwrap().signature(), (2, 0));
        assert!(g.scaled(0.0).is_err());
        let m = flipped.matrix_at(&[0.0, 0.0]).unwrap();
        assert_eq!(m[(0, 0)], -1.0);
    }
}
