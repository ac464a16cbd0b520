//! Truncated multivariate Taylor arithmetic of total order 3.
//!
//! A [`Jet`] stores the Taylor coefficients (partial derivatives divided by
//! the multi-index factorial) of a scalar quantity at a point, for every
//! multi-index of total degree <= 3.  Seeding each chart coordinate as an
//! independent variable and running a closed-form expression through jet
//! arithmetic yields all first, second and third partials exactly, up to
//! floating-point rounding.  Third order is the smallest order that closes
//! the implemented identities: the third covariant derivative of a scalar
//! needs three derivative levels, and curvature needs two levels of the
//! metric.
//!
//! Coefficients are stored by graded-lexicographic multi-index; symmetric
//! mixed partials are stored once.  Each jet also tracks how many derivative
//! orders are still trustworthy (`order`): taking a partial derivative drops
//! it by one, and arithmetic propagates the minimum of its operands.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Fixed truncation order.
pub const JET_ORDER: usize = 3;

const NO_PRODUCT: u32 = u32::MAX;

/// Shared per-dimension index table: multi-index layout, factorials and the
/// truncated product table.
#[derive(Debug)]
pub struct JetTable {
    dim: usize,
    indices: Vec<Vec<u8>>,
    degree: Vec<u8>,
    factorial: Vec<f64>,
    position: HashMap<Vec<u8>, usize>,
    /// `prod[i * len + j]` is the slot of `indices[i] + indices[j]`, or
    /// `NO_PRODUCT` when the sum exceeds the truncation order.
    prod: Vec<u32>,
}

impl JetTable {
    fn build(dim: usize) -> Self {
        let mut indices: Vec<Vec<u8>> = Vec::new();
        let mut current = vec![0u8; dim];
        gen_indices(&mut indices, &mut current, 0, JET_ORDER as u8);
        indices.sort_by(|a, b| {
            let da: u8 = a.iter().sum();
            let db: u8 = b.iter().sum();
            da.cmp(&db).then_with(|| a.cmp(b))
        });
        let degree: Vec<u8> = indices.iter().map(|m| m.iter().sum()).collect();
        let factorial: Vec<f64> = indices
            .iter()
            .map(|m| m.iter().map(|&k| fact(k)).product())
            .collect();
        let position: HashMap<Vec<u8>, usize> = indices
            .iter()
            .enumerate()
            .map(|(p, m)| (m.clone(), p))
            .collect();
        let len = indices.len();
        let mut prod = vec![NO_PRODUCT; len * len];
        for i in 0..len {
            for j in 0..len {
                if degree[i] + degree[j] <= JET_ORDER as u8 {
                    let sum: Vec<u8> = indices[i]
                        .iter()
                        .zip(indices[j].iter())
                        .map(|(a, b)| a + b)
                        .collect();
                    prod[i * len + j] = position[&sum] as u32;
                }
            }
        }
        JetTable {
            dim,
            indices,
            degree,
            factorial,
            position,
            prod,
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn indices(&self) -> &[Vec<u8>] {
        &self.indices
    }
}

fn fact(k: u8) -> f64 {
    (1..=k as u64).product::<u64>() as f64
}

fn gen_indices(out: &mut Vec<Vec<u8>>, current: &mut Vec<u8>, var: usize, budget: u8) {
    if var == current.len() {
        out.push(current.clone());
        return;
    }
    for k in 0..=budget {
        current[var] = k;
        gen_indices(out, current, var + 1, budget - k);
    }
    current[var] = 0;
}

fn table(dim: usize) -> Arc<JetTable> {
    static TABLES: OnceLock<Mutex<HashMap<usize, Arc<JetTable>>>> = OnceLock::new();
    let cache = TABLES.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("jet table cache poisoned");
    guard
        .entry(dim)
        .or_insert_with(|| Arc::new(JetTable::build(dim)))
        .clone()
}

/// Truncated Taylor expansion of a scalar at a point, total degree <= 3.
#[derive(Clone, Debug)]
pub struct Jet {
    table: Arc<JetTable>,
    /// Trustworthy derivative orders (0..=3).
    order: u8,
    coeffs: Vec<f64>,
}

impl Jet {
    /// Constant jet: value with all derivatives zero (exactly).
    pub fn constant(value: f64, dim: usize) -> Jet {
        let table = table(dim);
        let mut coeffs = vec![0.0; table.len()];
        coeffs[0] = value;
        Jet {
            table,
            order: JET_ORDER as u8,
            coeffs,
        }
    }

    /// Coordinate jet: value at the base point, first-order coefficient 1 in
    /// slot `index`, everything else zero.
    pub fn variable(value: f64, index: usize, dim: usize) -> Result<Jet> {
        if index >= dim {
            return Err(Error::Argument(format!(
                "variable index {index} out of range for dimension {dim}"
            )));
        }
        let mut jet = Jet::constant(value, dim);
        let mut mi = vec![0u8; dim];
        mi[index] = 1;
        let pos = jet.table.position[&mi];
        jet.coeffs[pos] = 1.0;
        Ok(jet)
    }

    /// Seed one coordinate jet per variable.
    pub fn seed_point(point: &[f64]) -> Result<Vec<Jet>> {
        point
            .iter()
            .enumerate()
            .map(|(i, &v)| Jet::variable(v, i, point.len()))
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.table.dim
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Raw Taylor coefficient of a multi-index.
    pub fn coeff(&self, multi_index: &[u8]) -> Result<f64> {
        let pos = self.slot(multi_index)?;
        Ok(self.coeffs[pos])
    }

    /// Partial derivative for a multi-index: coefficient times the
    /// multi-index factorial.
    pub fn extract_partial(&self, multi_index: &[u8]) -> Result<f64> {
        let pos = self.slot(multi_index)?;
        let deg = self.table.degree[pos];
        if deg > self.order {
            return Err(Error::Capability(format!(
                "degree-{deg} partial requested from an order-{} jet",
                self.order
            )));
        }
        Ok(self.coeffs[pos] * self.table.factorial[pos])
    }

    fn slot(&self, multi_index: &[u8]) -> Result<usize> {
        if multi_index.len() != self.table.dim {
            return Err(Error::Argument(format!(
                "multi-index length {} does not match dimension {}",
                multi_index.len(),
                self.table.dim
            )));
        }
        let deg: u8 = multi_index.iter().sum();
        if deg > JET_ORDER as u8 {
            return Err(Error::Argument(format!(
                "multi-index degree {deg} exceeds the truncation order {JET_ORDER}"
            )));
        }
        Ok(self.table.position[multi_index])
    }

    /// If this jet is exactly a seeded coordinate (one unit linear
    /// coefficient, nothing else beyond the value), returns its variable
    /// index.
    pub fn seed_index(&self) -> Option<usize> {
        let mut found = None;
        for (pos, &c) in self.coeffs.iter().enumerate().skip(1) {
            if c == 0.0 {
                continue;
            }
            let deg = self.table.degree[pos];
            if deg != 1 || c != 1.0 || found.is_some() {
                return None;
            }
            let var = self.table.indices[pos].iter().position(|&k| k == 1)?;
            found = Some(var);
        }
        found
    }

    /// Derivative with respect to ambient variable `var`; drops the
    /// trustworthy order by one.
    pub fn partial(&self, var: usize) -> Result<Jet> {
        if var >= self.table.dim {
            return Err(Error::Argument(format!(
                "partial with respect to variable {var} of a {}-dimensional jet",
                self.table.dim
            )));
        }
        let mut out = Jet {
            table: self.table.clone(),
            order: self.order.saturating_sub(1),
            coeffs: vec![0.0; self.coeffs.len()],
        };
        for (pos, mi) in self.table.indices.iter().enumerate() {
            if self.table.degree[pos] as usize == JET_ORDER {
                continue;
            }
            let mut up = mi.clone();
            up[var] += 1;
            let src = self.table.position[&up];
            out.coeffs[pos] = self.coeffs[src] * (mi[var] + 1) as f64;
        }
        Ok(out)
    }

    /// Gradient (first-order partials) as plain values.
    pub fn gradient(&self) -> Vec<f64> {
        let dim = self.table.dim;
        let mut g = vec![0.0; dim];
        for (pos, mi) in self.table.indices.iter().enumerate() {
            if self.table.degree[pos] == 1 {
                let var = mi.iter().position(|&k| k == 1).expect("degree-1 index");
                g[var] = self.coeffs[pos];
            }
        }
        g
    }

    fn same_space(&self, rhs: &Jet) -> Result<()> {
        if self.table.dim != rhs.table.dim {
            return Err(Error::Argument(format!(
                "jet dimensions differ: {} vs {}",
                self.table.dim, rhs.table.dim
            )));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Jet) -> Result<Jet> {
        self.same_space(rhs)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(rhs.coeffs.iter())
            .map(|(a, b)| a + b)
            .collect();
        Ok(Jet {
            table: self.table.clone(),
            order: self.order.min(rhs.order),
            coeffs,
        })
    }

    pub fn sub(&self, rhs: &Jet) -> Result<Jet> {
        self.same_space(rhs)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(rhs.coeffs.iter())
            .map(|(a, b)| a - b)
            .collect();
        Ok(Jet {
            table: self.table.clone(),
            order: self.order.min(rhs.order),
            coeffs,
        })
    }

    pub fn neg(&self) -> Jet {
        Jet {
            table: self.table.clone(),
            order: self.order,
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            table: self.table.clone(),
            order: self.order,
            coeffs: self.coeffs.iter().map(|a| a * s).collect(),
        }
    }

    pub fn add_scalar(&self, s: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    pub fn mul(&self, rhs: &Jet) -> Result<Jet> {
        self.same_space(rhs)?;
        let len = self.coeffs.len();
        let mut coeffs = vec![0.0; len];
        for i in 0..len {
            let a = self.coeffs[i];
            if a == 0.0 {
                continue;
            }
            let row = &self.table.prod[i * len..(i + 1) * len];
            for (j, &slot) in row.iter().enumerate() {
                if slot == NO_PRODUCT {
                    continue;
                }
                let b = rhs.coeffs[j];
                if b == 0.0 {
                    continue;
                }
                coeffs[slot as usize] += a * b;
            }
        }
        Ok(Jet {
            table: self.table.clone(),
            order: self.order.min(rhs.order),
            coeffs,
        })
    }

    pub fn div(&self, rhs: &Jet) -> Result<Jet> {
        self.mul(&rhs.recip()?)
    }

    /// Multiplicative inverse, defined when the value is nonzero.
    pub fn recip(&self) -> Result<Jet> {
        let v = self.value();
        if v == 0.0 || !v.is_finite() {
            return Err(Error::Domain(
                "division by a jet with zero value".to_string(),
            ));
        }
        // 1/(v + u) = (1/v)(1 - w + w^2 - w^3), w = u/v.
        let inv = 1.0 / v;
        self.compose(&[inv, -inv * inv, inv * inv * inv, -inv * inv * inv * inv])
    }

    /// Composition with a univariate function given by the Taylor
    /// coefficients `c[k] = f^(k)(value)/k!`.
    fn compose(&self, c: &[f64; 4]) -> Result<Jet> {
        let mut u = self.clone();
        u.coeffs[0] = 0.0;
        let u2 = u.mul(&u)?;
        let u3 = u2.mul(&u)?;
        let mut out = u.scale(c[1]);
        out = out.add(&u2.scale(c[2]))?;
        out = out.add(&u3.scale(c[3]))?;
        out.coeffs[0] += c[0];
        out.order = self.order;
        Ok(out)
    }

    pub fn exp(&self) -> Result<Jet> {
        let e = self.value().exp();
        self.compose(&[e, e, e / 2.0, e / 6.0])
    }

    pub fn ln(&self) -> Result<Jet> {
        let v = self.value();
        if v <= 0.0 {
            return Err(Error::Domain(format!("log of nonpositive value {v}")));
        }
        self.compose(&[v.ln(), 1.0 / v, -1.0 / (2.0 * v * v), 1.0 / (3.0 * v * v * v)])
    }

    pub fn sin(&self) -> Result<Jet> {
        let (s, c) = self.value().sin_cos();
        self.compose(&[s, c, -s / 2.0, -c / 6.0])
    }

    pub fn cos(&self) -> Result<Jet> {
        let (s, c) = self.value().sin_cos();
        self.compose(&[c, -s, -c / 2.0, s / 6.0])
    }

    pub fn sqrt(&self) -> Result<Jet> {
        let v = self.value();
        if v <= 0.0 {
            return Err(Error::Domain(format!("sqrt of nonpositive value {v}")));
        }
        let r = v.sqrt();
        self.compose(&[
            r,
            0.5 / r,
            -1.0 / (8.0 * r * v),
            1.0 / (16.0 * r * v * v),
        ])
    }

    /// Real power.  Nonnegative integer exponents work for any value;
    /// fractional or negative ones need a positive value.
    pub fn powf(&self, q: f64) -> Result<Jet> {
        if q == q.trunc() && (0.0..=64.0).contains(&q) {
            return Ok(self.powi(q as u32));
        }
        let v = self.value();
        if v <= 0.0 {
            return Err(Error::Domain(format!(
                "pow({q}) of nonpositive value {v}"
            )));
        }
        let c0 = v.powf(q);
        let c1 = q * v.powf(q - 1.0);
        let c2 = q * (q - 1.0) * v.powf(q - 2.0) / 2.0;
        let c3 = q * (q - 1.0) * (q - 2.0) * v.powf(q - 3.0) / 6.0;
        self.compose(&[c0, c1, c2, c3])
    }

    pub fn powi(&self, k: u32) -> Jet {
        let mut out = Jet::constant(1.0, self.table.dim);
        out.order = self.order;
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul(&base).expect("same table");
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base).expect("same table");
            }
        }
        out
    }

    /// Restrict the trustworthy order (used by derived fields).
    pub fn with_order(mut self, order: u8) -> Jet {
        self.order = self.order.min(order);
        self
    }

    /// Forget one variable: drop every coefficient with a derivative in
    /// `var` and renumber the rest.  Exact when the quantity genuinely does
    /// not depend on that variable.
    pub fn restrict_drop_var(&self, var: usize) -> Result<Jet> {
        let dim = self.table.dim;
        if var >= dim {
            return Err(Error::Argument(format!(
                "cannot drop variable {var} from a {dim}-dimensional jet"
            )));
        }
        if dim == 1 {
            return Err(Error::Argument(
                "cannot drop the only variable of a jet".to_string(),
            ));
        }
        let small = table(dim - 1);
        let mut coeffs = vec![0.0; small.len()];
        for (pos, mi) in small.indices.iter().enumerate() {
            let mut full = Vec::with_capacity(dim);
            full.extend_from_slice(&mi[..var]);
            full.push(0);
            full.extend_from_slice(&mi[var..]);
            coeffs[pos] = self.coeffs[self.table.position[&full]];
        }
        Ok(Jet {
            table: small,
            order: self.order,
            coeffs,
        })
    }
}

/// Sum of jets, erroring on empty input.
pub fn jet_sum(terms: &[Jet]) -> Result<Jet> {
    let first = terms
        .first()
        .ok_or_else(|| Error::Argument("empty jet sum".to_string()))?;
    let mut acc = first.clone();
    for t in &terms[1..] {
        acc = acc.add(t)?;
    }
    Ok(acc)
}

/// Ambient variable ids of a seed slice; errors when an entry is not a pure
/// coordinate jet.  Derived fields use this so they stay valid when their
/// seeds live in a larger variable space (e.g. base coordinates inside a
/// cone chart).
pub fn seed_positions(seeds: &[Jet]) -> Result<Vec<usize>> {
    seeds
        .iter()
        .enumerate()
        .map(|(i, jet)| {
            jet.seed_index().ok_or_else(|| {
                Error::Capability(format!(
                    "input {i} is not a seeded coordinate jet; derived fields \
                     can only be evaluated on coordinate seeds"
                ))
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(value: f64, index: usize, dim: usize) -> Jet {
        Jet::variable(value, index, dim).unwrap()
    }

    #[test]
    fn seed_variable_layout() {
        let j = var(2.0, 0, 2);
        assert_eq!(j.value(), 2.0);
        assert_eq!(j.extract_partial(&[1, 0]).unwrap(), 1.0);
        assert_eq!(j.extract_partial(&[0, 1]).unwrap(), 0.0);
        assert_eq!(j.extract_partial(&[2, 0]).unwrap(), 0.0);

        let j = var(0.0, 1, 3);
        assert_eq!(j.value(), 0.0);
        assert_eq!(j.extract_partial(&[0, 1, 0]).unwrap(), 1.0);
    }

    #[test]
    fn seed_variable_rejects_bad_index() {
        assert!(Jet::variable(1.0, 2, 2).is_err());
    }

    #[test]
    fn square_of_coordinate() {
        // x^2 at x = 2: value 4, f' = 4, f'' = 2, f''' = 0.
        let x = var(2.0, 0, 1);
        let sq = x.mul(&x).unwrap();
        assert_eq!(sq.value(), 4.0);
        assert_eq!(sq.extract_partial(&[1]).unwrap(), 4.0);
        assert_eq!(sq.extract_partial(&[2]).unwrap(), 2.0);
        assert_eq!(sq.extract_partial(&[3]).unwrap(), 0.0);
        // x*x at x = 3 has coefficients (9, 6, 1, 0).
        let x = var(3.0, 0, 1);
        let sq = x.mul(&x).unwrap();
        assert_eq!(sq.coeffs(), &[9.0, 6.0, 1.0, 0.0]);
    }

    #[test]
    fn exp_at_zero() {
        let x = var(0.0, 0, 1);
        let e = x.exp().unwrap();
        let c = e.coeffs();
        assert!((c[0] - 1.0).abs() < 1e-15);
        assert!((c[1] - 1.0).abs() < 1e-15);
        assert!((c[2] - 0.5).abs() < 1e-15);
        assert!((c[3] - 1.0 / 6.0).abs() < 1e-15);
        // Third partial of exp at 0 is 1.
        assert!((e.extract_partial(&[3]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sin_matches_finite_differences() {
        // Central second-order stencils with h = 1e-3 at x = 0.7.
        let x0 = 0.7_f64;
        let h = 1e-3;
        let f = |x: f64| x.sin();
        let fd1 = (f(x0 + h) - f(x0 - h)) / (2.0 * h);
        let fd2 = (f(x0 + h) - 2.0 * f(x0) + f(x0 - h)) / (h * h);
        let fd3 = (f(x0 + 2.0 * h) - 2.0 * f(x0 + h) + 2.0 * f(x0 - h) - f(x0 - 2.0 * h))
            / (2.0 * h * h * h);
        let jet = var(x0, 0, 1).sin().unwrap();
        let checks = [
            (jet.value(), f(x0)),
            (jet.extract_partial(&[1]).unwrap(), fd1),
            (jet.extract_partial(&[2]).unwrap(), fd2),
            (jet.extract_partial(&[3]).unwrap(), fd3),
        ];
        for (exact, approx) in checks {
            assert!(
                (exact - approx).abs() / exact.abs().max(1e-2) < 1e-5,
                "jet {exact} vs stencil {approx}"
            );
        }
    }

    #[test]
    fn division_by_zero_value_fails() {
        let x = var(0.0, 0, 1);
        let one = Jet::constant(1.0, 1);
        assert!(one.div(&x).is_err());
        assert!(x.ln().is_err());
        assert!(var(-1.0, 0, 1).sqrt().is_err());
    }

    #[test]
    fn extract_partial_degree_cap() {
        let x = var(1.0, 0, 2);
        assert!(x.extract_partial(&[2, 2]).is_err());
        assert_eq!(x.extract_partial(&[0, 0]).unwrap(), 1.0);
    }

    #[test]
    fn chain_rule_exp_log_roundtrip() {
        let mut f = var(0.4, 0, 2);
        let y = var(1.3, 1, 2);
        f = f.mul(&y).unwrap().add_scalar(2.0);
        let back = f.exp().unwrap().ln().unwrap();
        for (a, b) in back.coeffs().iter().zip(f.coeffs()) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn partial_drops_order() {
        let x = var(2.0, 0, 2);
        let y = var(0.5, 1, 2);
        let f = x.powi(3).mul(&y).unwrap();
        assert_eq!(f.order(), 3);
        let fx = f.partial(0).unwrap();
        assert_eq!(fx.order(), 2);
        // d/dx (x^3 y) = 3 x^2 y
        assert!((fx.value() - 3.0 * 4.0 * 0.5).abs() < 1e-14);
        assert!((fx.extract_partial(&[1, 0]).unwrap() - 6.0 * 2.0 * 0.5).abs() < 1e-14);
    }

    #[test]
    fn seed_index_detection() {
        assert_eq!(var(7.0, 1, 3).seed_index(), Some(1));
        assert_eq!(Jet::constant(1.0, 3).seed_index(), None);
        let x = var(1.0, 0, 2);
        assert_eq!(x.mul(&x).unwrap().seed_index(), None);
    }

    #[test]
    fn mixed_partials_of_product() {
        // f = x^2 y at (2, 3): d^3 f / dx^2 dy = 2.
        let x = var(2.0, 0, 2);
        let y = var(3.0, 1, 2);
        let f = x.mul(&x).unwrap().mul(&y).unwrap();
        assert!((f.extract_partial(&[2, 1]).unwrap() - 2.0).abs() < 1e-14);
        assert!((f.extract_partial(&[1, 1]).unwrap() - 2.0 * 2.0).abs() < 1e-14);
        assert!((f.extract_partial(&[2, 0]).unwrap() - 2.0 * 3.0).abs() < 1e-14);
    }
}
