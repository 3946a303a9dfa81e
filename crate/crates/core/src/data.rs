//! Panel count observations.
//!
//! Each [`Subject`] carries a covariate vector and the cumulative event
//! counts seen at its own inspection times. A [`Dataset`] bundles subjects
//! with the pooled grid of distinct observation times; every estimate of the
//! baseline mean function lives on that grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subject {
    id: String,
    z: Vec<f64>,
    times: Vec<f64>,
    counts: Vec<u64>,
}

impl Subject {
    /// Builds a subject from already-ordered observations.
    ///
    /// Times must be positive and strictly increasing, counts nondecreasing.
    pub fn new(id: impl Into<String>, z: Vec<f64>, times: Vec<f64>, counts: Vec<u64>) -> Result<Self> {
        let id = id.into();
        if times.is_empty() {
            return Err(Error::validation(&id, "no observations"));
        }
        if times.len() != counts.len() {
            return Err(Error::validation(
                &id,
                format!("{} times but {} counts", times.len(), counts.len()),
            ));
        }
        if let Some(bad) = z.iter().find(|v| !v.is_finite()) {
            return Err(Error::validation(&id, format!("non-finite covariate {bad}")));
        }
        if times.iter().any(|&t| !(t.is_finite() && t > 0.0)) {
            return Err(Error::validation(&id, "observation times must be finite and positive"));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::validation(&id, "observation times must be strictly increasing"));
        }
        if counts.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::validation(&id, "cumulative counts must be nondecreasing"));
        }
        Ok(Subject { id, z, times, counts })
    }

    /// Builds a subject from observations in arbitrary order.
    ///
    /// Observations are sorted by time and repeated times are collapsed to a
    /// single observation carrying the largest cumulative count.
    pub fn from_observations(
        id: impl Into<String>,
        z: Vec<f64>,
        mut obs: Vec<(f64, u64)>,
    ) -> Result<Self> {
        let id = id.into();
        if obs.iter().any(|(t, _)| t.is_nan()) {
            return Err(Error::validation(&id, "NaN observation time"));
        }
        obs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut times: Vec<f64> = Vec::with_capacity(obs.len());
        let mut counts: Vec<u64> = Vec::with_capacity(obs.len());
        for (t, n) in obs {
            if times.last() == Some(&t) {
                // sorted by count within a time, so the last one is the largest
                *counts.last_mut().unwrap() = n;
            } else {
                times.push(t);
                counts.push(n);
            }
        }
        Subject::new(id, z, times, counts)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Number of inspection times, K.
    pub fn k(&self) -> usize {
        self.times.len()
    }

    /// Count increments between consecutive inspections, starting from N(0) = 0.
    pub fn increments(&self) -> impl Iterator<Item = u64> + '_ {
        let mut prev = 0;
        self.counts.iter().map(move |&c| {
            let d = c - prev;
            prev = c;
            d
        })
    }

    /// Linear predictor βᵀz.
    pub fn linear_predictor(&self, beta: &[f64]) -> f64 {
        self.z.iter().zip(beta).map(|(z, b)| z * b).sum()
    }

    pub(crate) fn with_id(&self, id: String) -> Subject {
        Subject { id, ..self.clone() }
    }
}

/// An immutable collection of subjects sharing a covariate dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    subjects: Vec<Subject>,
    dim: usize,
    grid: Vec<f64>,
    // grid position of every subject observation, parallel to `subjects`
    grid_index: Vec<Vec<usize>>,
}

impl Dataset {
    pub fn new(subjects: Vec<Subject>) -> Result<Self> {
        let first = subjects
            .first()
            .ok_or_else(|| Error::input("dataset has no subjects"))?;
        let dim = first.z.len();
        if let Some(s) = subjects.iter().find(|s| s.z.len() != dim) {
            return Err(Error::validation(
                &s.id,
                format!("covariate dimension {} differs from {dim}", s.z.len()),
            ));
        }

        let mut grid: Vec<f64> = subjects.iter().flat_map(|s| s.times.iter().copied()).collect();
        grid.sort_by(f64::total_cmp);
        grid.dedup();

        let grid_index = subjects
            .iter()
            .map(|s| {
                s.times
                    .iter()
                    .map(|t| grid.binary_search_by(|g| g.total_cmp(t)).expect("time on grid"))
                    .collect()
            })
            .collect();

        Ok(Dataset {
            subjects,
            dim,
            grid,
            grid_index,
        })
    }

    pub fn subjects(&self) -> &[Subject] {
        &self.subjects
    }

    pub fn len(&self) -> usize {
        self.subjects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subjects.is_empty()
    }

    /// Covariate dimension d.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sorted distinct observation times pooled over all subjects.
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Positions on [`Dataset::grid`] of subject `i`'s observation times.
    pub fn grid_index(&self, i: usize) -> &[usize] {
        &self.grid_index[i]
    }

    /// Total number of (subject, time) observations.
    pub fn n_observations(&self) -> usize {
        self.subjects.iter().map(Subject::k).sum()
    }

    pub fn max_k(&self) -> usize {
        self.subjects.iter().map(Subject::k).max().unwrap_or(0)
    }

    pub fn total_count(&self) -> u64 {
        self.subjects.iter().map(|s| *s.counts.last().unwrap()).sum()
    }

    /// Returns a dataset built from the subjects at `indices` (repeats allowed).
    ///
    /// Subject ids are suffixed with the draw position so resampled copies
    /// stay distinguishable.
    pub fn resample(&self, indices: &[usize]) -> Result<Dataset> {
        let subjects = indices
            .iter()
            .enumerate()
            .map(|(pos, &i)| {
                let s = self
                    .subjects
                    .get(i)
                    .ok_or_else(|| Error::input(format!("subject index {i} out of range")))?;
                Ok(s.with_id(format!("{}#{pos}", s.id)))
            })
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(subjects)
    }

    /// Column means of the covariates.
    pub fn covariate_means(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.dim];
        for s in &self.subjects {
            for (m, z) in mean.iter_mut().zip(&s.z) {
                *m += z;
            }
        }
        let n = self.subjects.len() as f64;
        mean.iter_mut().for_each(|m| *m /= n);
        mean
    }

    /// Same observations with `shift` subtracted from every covariate vector.
    pub fn shifted(&self, shift: &[f64]) -> Dataset {
        let subjects = self
            .subjects
            .iter()
            .map(|s| Subject {
                z: s.z.iter().zip(shift).map(|(z, c)| z - c).collect(),
                ..s.clone()
            })
            .collect();
        Dataset {
            subjects,
            ..self.clone()
        }
    }

    pub(crate) fn check_beta(&self, beta: &[f64]) -> Result<()> {
        if beta.len() != self.dim {
            return Err(Error::input(format!(
                "beta has length {} but covariates have dimension {}",
                beta.len(),
                self.dim
            )));
        }
        if beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::input("beta has non-finite entries"));
        }
        Ok(())
    }
}
