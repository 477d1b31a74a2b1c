//! Samples, data splits and the validated problem instance shared by every
//! procedure.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A labeled observation `(x, y)` together with its selection threshold `c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub x: Vec<f64>,
    pub y: f64,
    pub c: f64,
}

impl LabeledSample {
    pub fn new(x: Vec<f64>, y: f64, c: f64) -> Self {
        Self { x, y, c }
    }

    /// Whether the response fails the selection criterion `y > c`.
    pub fn is_null(&self) -> bool {
        self.y <= self.c
    }
}

/// A test point. `y_hidden` is ground truth kept only for evaluation; no
/// procedure reads it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestSample {
    pub x: Vec<f64>,
    pub c: f64,
    #[serde(default)]
    pub y_hidden: Option<f64>,
}

impl TestSample {
    pub fn new(x: Vec<f64>, c: f64) -> Self {
        Self {
            x,
            c,
            y_hidden: None,
        }
    }

    pub fn with_truth(x: Vec<f64>, c: f64, y: f64) -> Self {
        Self {
            x,
            c,
            y_hidden: Some(y),
        }
    }

    /// The partial observation with the response imputed at the threshold.
    pub fn imputed(&self) -> LabeledSample {
        LabeledSample::new(self.x.clone(), self.c, self.c)
    }
}

/// Sizes of the preparatory, calibration and test blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataSplit {
    pub n1: usize,
    pub n2: usize,
    pub m: usize,
}

impl DataSplit {
    pub fn new(n1: usize, n2: usize, m: usize) -> Self {
        Self { n1, n2, m }
    }

    pub fn n(&self) -> usize {
        self.n1 + self.n2
    }
}

/// A checked problem instance. Labeled samples are partitioned by position:
/// the first `n1` are preparatory, the remaining `n2` are calibration.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    labeled: Vec<LabeledSample>,
    test: Vec<TestSample>,
    split: DataSplit,
    dim: usize,
}

fn check_finite(v: f64, what: impl FnOnce() -> String) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(what()))
    }
}

impl Problem {
    pub fn new(labeled: Vec<LabeledSample>, test: Vec<TestSample>, split: DataSplit) -> Result<Self> {
        if labeled.len() != split.n() {
            return Err(Error::LengthMismatch(format!(
                "{} labeled samples but n1 + n2 = {}",
                labeled.len(),
                split.n()
            )));
        }
        if test.len() != split.m {
            return Err(Error::LengthMismatch(format!(
                "{} test samples but m = {}",
                test.len(),
                split.m
            )));
        }
        if split.n2 == 0 {
            return Err(Error::EmptyCalibration);
        }
        if split.m == 0 {
            return Err(Error::EmptyTest);
        }
        let dim = labeled[0].x.len();
        for (i, s) in labeled.iter().enumerate() {
            if s.x.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: s.x.len(),
                    what: format!("labeled sample {}", i + 1),
                });
            }
            for v in &s.x {
                check_finite(*v, || format!("features of labeled sample {}", i + 1))?;
            }
            check_finite(s.y, || format!("response of labeled sample {}", i + 1))?;
            check_finite(s.c, || format!("threshold of labeled sample {}", i + 1))?;
        }
        for (j, s) in test.iter().enumerate() {
            if s.x.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: s.x.len(),
                    what: format!("test sample {}", j + 1),
                });
            }
            for v in &s.x {
                check_finite(*v, || format!("features of test sample {}", j + 1))?;
            }
            check_finite(s.c, || format!("threshold of test sample {}", j + 1))?;
            if let Some(y) = s.y_hidden {
                check_finite(y, || format!("ground truth of test sample {}", j + 1))?;
            }
        }
        Ok(Self {
            labeled,
            test,
            split,
            dim,
        })
    }

    /// Builds a problem whose split is inferred from `n1` and the sample counts.
    pub fn with_preparatory(labeled: Vec<LabeledSample>, test: Vec<TestSample>, n1: usize) -> Result<Self> {
        if n1 > labeled.len() {
            return Err(Error::EmptyCalibration);
        }
        let split = DataSplit::new(n1, labeled.len() - n1, test.len());
        Self::new(labeled, test, split)
    }

    pub fn split(&self) -> DataSplit {
        self.split
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n1(&self) -> usize {
        self.split.n1
    }

    pub fn n2(&self) -> usize {
        self.split.n2
    }

    pub fn n(&self) -> usize {
        self.split.n()
    }

    pub fn m(&self) -> usize {
        self.split.m
    }

    pub fn labeled(&self) -> &[LabeledSample] {
        &self.labeled
    }

    pub fn preparatory(&self) -> &[LabeledSample] {
        &self.labeled[..self.split.n1]
    }

    pub fn calibration(&self) -> &[LabeledSample] {
        &self.labeled[self.split.n1..]
    }

    pub fn test(&self) -> &[TestSample] {
        &self.test
    }

    /// Test points as labeled samples with `y` imputed at `c`.
    pub fn imputed_test(&self) -> Vec<LabeledSample> {
        self.test.iter().map(TestSample::imputed).collect()
    }

    /// Same instance with every `y_hidden` erased.
    pub fn without_ground_truth(&self) -> Self {
        let mut out = self.clone();
        for t in &mut out.test {
            t.y_hidden = None;
        }
        out
    }

    /// Ground-truth responses of the test block, for metric computation.
    pub fn ground_truth(&self) -> Result<Vec<f64>> {
        self.test
            .iter()
            .enumerate()
            .map(|(j, t)| t.y_hidden.ok_or(Error::MissingGroundTruth(j + 1)))
            .collect()
    }

    /// True when every label is 0/1 and every threshold is 0.
    pub fn is_binary(&self) -> bool {
        self.labeled
            .iter()
            .all(|s| (s.y == 0.0 || s.y == 1.0) && s.c == 0.0)
            && self.test.iter().all(|t| t.c == 0.0)
    }

    /// Returns a problem with the same samples re-partitioned by `n1`.
    pub fn repartition(&self, n1: usize) -> Result<Self> {
        Self::with_preparatory(self.labeled.clone(), self.test.clone(), n1)
    }
}

/// Total lexicographic order over `(x, y, c)` used to canonicalize training
/// sets.
pub(crate) fn canonical_cmp(a: &LabeledSample, b: &LabeledSample) -> Ordering {
    for (u, v) in a.x.iter().zip(&b.x) {
        match u.total_cmp(v) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    a.x.len()
        .cmp(&b.x.len())
        .then_with(|| a.y.total_cmp(&b.y))
        .then_with(|| a.c.total_cmp(&b.c))
}

/// Sorted copy of `data` in canonical order.
pub(crate) fn canonical_sorted(data: &[LabeledSample]) -> Vec<LabeledSample> {
    let mut v = data.to_vec();
    v.sort_by(canonical_cmp);
    v
}
