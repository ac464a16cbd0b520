//! Named coordinate patches with domain predicates and seeded samplers.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::jet::Jet;

type DomainFn = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// A coordinate patch: dimension, a domain predicate and a box the seeded
/// sampler draws from (with rejection against the predicate).
#[derive(Clone)]
pub struct Chart {
    name: String,
    dim: usize,
    sample_box: Vec<(f64, f64)>,
    domain: DomainFn,
}

impl std::fmt::Debug for Chart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Chart")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("sample_box", &self.sample_box)
            .finish()
    }
}

impl Chart {
    pub fn new(
        name: impl Into<String>,
        sample_box: Vec<(f64, f64)>,
        domain: impl Fn(&[f64]) -> bool + Send + Sync + 'static,
    ) -> Chart {
        Chart {
            name: name.into(),
            dim: sample_box.len(),
            sample_box,
            domain: Arc::new(domain),
        }
    }

    /// Chart whose domain is exactly the sample box (with a margin factor).
    pub fn boxed(name: impl Into<String>, sample_box: Vec<(f64, f64)>) -> Chart {
        let bounds: Vec<(f64, f64)> = sample_box
            .iter()
            .map(|&(lo, hi)| {
                let pad = 0.5 * (hi - lo).abs().max(1.0);
                (lo - pad, hi + pad)
            })
            .collect();
        Chart::new(name, sample_box, move |p| {
            p.iter()
                .zip(bounds.iter())
                .all(|(x, &(lo, hi))| *x >= lo && *x <= hi)
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sample_box(&self) -> &[(f64, f64)] {
        &self.sample_box
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim && (self.domain)(p)
    }

    pub fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::Argument(format!(
                "point of dimension {} on {}-dimensional chart {}",
                p.len(),
                self.dim,
                self.name
            )));
        }
        if !(self.domain)(p) {
            return Err(Error::Domain(format!(
                "point {p:?} outside the domain of chart {}",
                self.name
            )));
        }
        Ok(())
    }

    /// Deterministic in-domain sample: uniform draws from the box, rejected
    /// against the domain predicate.  The same seed always yields the same
    /// points.
    pub fn sample(&self, seed: u64, count: usize) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0usize;
        while out.len() < count {
            attempts += 1;
            if attempts > 1000 * count.max(1) {
                panic!(
                    "sampler for chart {} rejected too many points; \
                     sample box and domain are inconsistent",
                    self.name
                );
            }
            let p: Vec<f64> = self
                .sample_box
                .iter()
                .map(|&(lo, hi)| rng.random_range(lo..hi))
                .collect();
            if (self.domain)(&p) {
                out.push(p);
            }
        }
        out
    }

    /// Coordinate jets at a point (each coordinate an independent variable).
    pub fn seeds_at(&self, p: &[f64]) -> Result<Vec<Jet>> {
        self.check_point(p)?;
        Jet::seed_point(p)
    }
}
