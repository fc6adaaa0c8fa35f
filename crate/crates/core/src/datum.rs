//! Borcherds–Cartan data.
//!
//! A datum is an index set `I`, an integer matrix `A = (a_ij)` with even
//! diagonal entries in `{2, 0, -2, -4, ...}` and nonpositive off-diagonal
//! entries, a positive symmetrizer `D = diag(r_i)` with `DA` symmetric, and an
//! orientation of the graph whose edges join `i != j` with `i·j != 0`.
//!
//! Index labels are opaque strings; everything else in the crate addresses
//! indices by their position in [`BorcherdsCartanDatum::labels`].

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Position of an index label inside a datum.
pub type Index = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatumError {
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("empty index set")]
    Empty,
    #[error("expected {expected} labels, found {found}")]
    LabelCount { expected: usize, found: usize },
    #[error("duplicate index label {0:?}")]
    DuplicateLabel(String),
    #[error("symmetrizer has length {found}, expected {expected}")]
    SymmetrizerLength { expected: usize, found: usize },
    #[error("symmetrizer entry r_{index} = {value} is not positive")]
    NonPositiveSymmetrizer { index: String, value: i64 },
    #[error("diagonal entry a_{index}{index} = {value} is not one of 2, 0, -2, -4, ...")]
    OddDiagonal { index: String, value: i64 },
    #[error("off-diagonal entry a_({i},{j}) = {value} is positive")]
    PositiveOffDiagonal { i: String, j: String, value: i64 },
    #[error("r_{i} a_({i},{j}) = {left} but r_{j} a_({j},{i}) = {right}")]
    NotSymmetrizable {
        i: String,
        j: String,
        left: i64,
        right: i64,
    },
    #[error("no symmetrizer exists for this matrix")]
    NoSymmetrizer,
    #[error("bad orientation: {0}")]
    BadOrientation(String),
    #[error("unknown index label {0:?}")]
    UnknownLabel(String),
    #[error("malformed datum file: {0}")]
    Parse(String),
}

impl DatumError {
    /// Stable machine-readable name of the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            DatumError::NotSquare { .. } => "NotSquare",
            DatumError::Empty => "Empty",
            DatumError::LabelCount { .. } => "LabelCount",
            DatumError::DuplicateLabel(_) => "DuplicateLabel",
            DatumError::SymmetrizerLength { .. } => "SymmetrizerLength",
            DatumError::NonPositiveSymmetrizer { .. } => "NonPositiveSymmetrizer",
            DatumError::OddDiagonal { .. } => "OddDiagonal",
            DatumError::PositiveOffDiagonal { .. } => "PositiveOffDiagonal",
            DatumError::NotSymmetrizable { .. } => "NotSymmetrizable",
            DatumError::NoSymmetrizer => "NoSymmetrizer",
            DatumError::BadOrientation(_) => "BadOrientation",
            DatumError::UnknownLabel(_) => "UnknownLabel",
            DatumError::Parse(_) => "Parse",
        }
    }
}

/// The real/imaginary split of the index set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexClass {
    pub real: Vec<Index>,
    pub imaginary: Vec<Index>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BorcherdsCartanDatum {
    labels: Vec<String>,
    matrix: Vec<Vec<i64>>,
    symmetrizer: Vec<i64>,
    /// Oriented edges `(i, j)` meaning `i -> j`.
    orientation: BTreeSet<(Index, Index)>,
}

/// On-disk layout of a datum. `D` and `orientation` are optional.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatumFile {
    pub indices: Vec<String>,
    #[serde(rename = "A")]
    pub matrix: Vec<Vec<i64>>,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub symmetrizer: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<Vec<(String, String)>>,
}

impl BorcherdsCartanDatum {
    /// Validates raw data and builds a datum. When `orientation` is `None`
    /// every edge is oriented from its lower position to its higher one.
    pub fn new(
        labels: Vec<String>,
        matrix: Vec<Vec<i64>>,
        symmetrizer: Vec<i64>,
        orientation: Option<Vec<(String, String)>>,
    ) -> Result<Self, DatumError> {
        let n = matrix.len();
        if n == 0 {
            return Err(DatumError::Empty);
        }
        for (row, entries) in matrix.iter().enumerate() {
            if entries.len() != n {
                return Err(DatumError::NotSquare {
                    row,
                    len: entries.len(),
                    expected: n,
                });
            }
        }
        if labels.len() != n {
            return Err(DatumError::LabelCount {
                expected: n,
                found: labels.len(),
            });
        }
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(DatumError::DuplicateLabel(l.clone()));
            }
        }
        if symmetrizer.len() != n {
            return Err(DatumError::SymmetrizerLength {
                expected: n,
                found: symmetrizer.len(),
            });
        }
        for (i, &r) in symmetrizer.iter().enumerate() {
            if r <= 0 {
                return Err(DatumError::NonPositiveSymmetrizer {
                    index: labels[i].clone(),
                    value: r,
                });
            }
        }
        for i in 0..n {
            let d = matrix[i][i];
            if d > 2 || d % 2 != 0 {
                return Err(DatumError::OddDiagonal {
                    index: labels[i].clone(),
                    value: d,
                });
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && matrix[i][j] > 0 {
                    return Err(DatumError::PositiveOffDiagonal {
                        i: labels[i].clone(),
                        j: labels[j].clone(),
                        value: matrix[i][j],
                    });
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let left = symmetrizer[i] * matrix[i][j];
                let right = symmetrizer[j] * matrix[j][i];
                if left != right {
                    return Err(DatumError::NotSymmetrizable {
                        i: labels[i].clone(),
                        j: labels[j].clone(),
                        left,
                        right,
                    });
                }
            }
        }

        let position = |l: &str| -> Result<Index, DatumError> {
            labels
                .iter()
                .position(|x| x == l)
                .ok_or_else(|| DatumError::UnknownLabel(l.to_string()))
        };
        let is_edge = |i: Index, j: Index| i != j && symmetrizer[i] * matrix[i][j] != 0;

        let orientation = match orientation {
            None => {
                let mut set = BTreeSet::new();
                for i in 0..n {
                    for j in (i + 1)..n {
                        if is_edge(i, j) {
                            set.insert((i, j));
                        }
                    }
                }
                set
            }
            Some(pairs) => {
                let mut set = BTreeSet::new();
                for (a, b) in &pairs {
                    let (i, j) = (position(a)?, position(b)?);
                    if !is_edge(i, j) {
                        return Err(DatumError::BadOrientation(format!(
                            "{a} -> {b} is not an edge of the graph"
                        )));
                    }
                    if set.contains(&(j, i)) || !set.insert((i, j)) {
                        return Err(DatumError::BadOrientation(format!(
                            "edge {{{a}, {b}}} is oriented more than once"
                        )));
                    }
                }
                for i in 0..n {
                    for j in (i + 1)..n {
                        if is_edge(i, j) && !set.contains(&(i, j)) && !set.contains(&(j, i)) {
                            return Err(DatumError::BadOrientation(format!(
                                "edge {{{}, {}}} has no orientation",
                                labels[i], labels[j]
                            )));
                        }
                    }
                }
                set
            }
        };

        Ok(Self {
            labels,
            matrix,
            symmetrizer,
            orientation,
        })
    }

    /// Builds a datum from a matrix alone, with generated labels `i0, i1, ...`
    /// and the smallest symmetrizer.
    pub fn from_matrix(matrix: Vec<Vec<i64>>) -> Result<Self, DatumError> {
        let d = find_symmetrizer(&matrix).ok_or(DatumError::NoSymmetrizer)?;
        let labels = (0..matrix.len()).map(|i| format!("i{i}")).collect();
        Self::new(labels, matrix, d, None)
    }

    pub fn from_file(file: DatumFile) -> Result<Self, DatumError> {
        let d = match file.symmetrizer {
            Some(d) => d,
            None => {
                // shape errors take precedence over a failed symmetrizer search
                let n = file.matrix.len();
                if let Some((row, r)) = file.matrix.iter().enumerate().find(|(_, r)| r.len() != n) {
                    return Err(DatumError::NotSquare {
                        row,
                        len: r.len(),
                        expected: n,
                    });
                }
                find_symmetrizer(&file.matrix).ok_or(DatumError::NoSymmetrizer)?
            }
        };
        Self::new(file.indices, file.matrix, d, file.orientation)
    }

    pub fn from_json(text: &str) -> Result<Self, DatumError> {
        let file: DatumFile =
            serde_json::from_str(text).map_err(|e| DatumError::Parse(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn to_file(&self) -> DatumFile {
        DatumFile {
            indices: self.labels.clone(),
            matrix: self.matrix.clone(),
            symmetrizer: Some(self.symmetrizer.clone()),
            orientation: Some(
                self.orientation
                    .iter()
                    .map(|&(i, j)| (self.labels[i].clone(), self.labels[j].clone()))
                    .collect(),
            ),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("datum serializes")
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: Index) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<Index, DatumError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| DatumError::UnknownLabel(label.to_string()))
    }

    /// `a_ij`.
    pub fn cartan(&self, i: Index, j: Index) -> i64 {
        self.matrix[i][j]
    }

    /// `r_i`.
    pub fn r(&self, i: Index) -> i64 {
        self.symmetrizer[i]
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn symmetrizer(&self) -> &[i64] {
        &self.symmetrizer
    }

    /// The symmetric form `i·j = r_i a_ij`.
    pub fn bilinear(&self, i: Index, j: Index) -> i64 {
        self.symmetrizer[i] * self.matrix[i][j]
    }

    pub fn is_real(&self, i: Index) -> bool {
        self.matrix[i][i] == 2
    }

    pub fn is_imaginary(&self, i: Index) -> bool {
        !self.is_real(i)
    }

    pub fn index_class(&self) -> IndexClass {
        let (real, imaginary) = (0..self.rank()).partition(|&i| self.is_real(i));
        IndexClass { real, imaginary }
    }

    /// True when the edge between `i` and `j` is oriented `i -> j`.
    pub fn has_arrow(&self, i: Index, j: Index) -> bool {
        self.orientation.contains(&(i, j))
    }

    pub fn orientation(&self) -> impl Iterator<Item = (Index, Index)> + '_ {
        self.orientation.iter().copied()
    }
}

impl fmt::Display for BorcherdsCartanDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

/// Smallest positive integer vector `D` with `DA` symmetric, if any.
///
/// Ratios `r_j / r_i = a_ij / a_ji` are propagated along the connected
/// components of the graph `a_ij != 0`; each component is then scaled to
/// coprime integers. Returns `None` when the matrix is not square, some pair
/// has exactly one zero among `a_ij, a_ji`, or a cycle is inconsistent.
pub fn find_symmetrizer(matrix: &[Vec<i64>]) -> Option<Vec<i64>> {
    let n = matrix.len();
    if matrix.iter().any(|r| r.len() != n) {
        return None;
    }
    let mut ratio: Vec<Option<Ratio<i64>>> = vec![None; n];
    for start in 0..n {
        if ratio[start].is_some() {
            continue;
        }
        ratio[start] = Some(Ratio::from_integer(1));
        let mut component = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let ri = ratio[i].unwrap();
            for j in 0..n {
                if i == j {
                    continue;
                }
                let (aij, aji) = (matrix[i][j], matrix[j][i]);
                match (aij == 0, aji == 0) {
                    (true, true) => continue,
                    (true, false) | (false, true) => return None,
                    _ => {}
                }
                // r_i a_ij = r_j a_ji
                let rj = ri * Ratio::new(aij, aji);
                match ratio[j] {
                    None => {
                        ratio[j] = Some(rj);
                        component.push(j);
                        queue.push_back(j);
                    }
                    Some(existing) if existing != rj => return None,
                    Some(_) => {}
                }
            }
        }
        let lcm = component
            .iter()
            .fold(1i64, |acc, &i| acc.lcm(ratio[i].unwrap().denom()));
        let ints: Vec<i64> = component
            .iter()
            .map(|&i| (ratio[i].unwrap() * lcm).to_integer())
            .collect();
        let g = ints.iter().fold(0i64, |acc, &x| acc.gcd(&x));
        for (&i, v) in component.iter().zip(ints) {
            ratio[i] = Some(Ratio::from_integer(v / g));
        }
    }
    let d: Vec<i64> = ratio.into_iter().map(|r| r.unwrap().to_integer()).collect();
    if d.iter().any(|&r| r <= 0) {
        return None;
    }
    Some(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("i{i}")).collect()
    }

    /// Exhaustive search over small symmetrizers; independent of the ratio
    /// propagation in `find_symmetrizer`.
    fn brute_force_symmetrizer(a: &[Vec<i64>], bound: i64) -> Option<Vec<i64>> {
        let n = a.len();
        let mut d = vec![1i64; n];
        loop {
            let ok = (0..n).all(|i| (0..n).all(|j| d[i] * a[i][j] == d[j] * a[j][i]));
            if ok {
                return Some(d);
            }
            let mut k = 0;
            loop {
                if k == n {
                    return None;
                }
                d[k] += 1;
                if d[k] <= bound {
                    break;
                }
                d[k] = 1;
                k += 1;
            }
        }
    }

    #[test]
    fn rank_one_real_and_imaginary() {
        let d = BorcherdsCartanDatum::new(labels(1), vec![vec![2]], vec![1], None).unwrap();
        assert_eq!(d.index_class(), IndexClass { real: vec![0], imaginary: vec![] });
        let d = BorcherdsCartanDatum::new(labels(1), vec![vec![0]], vec![1], None).unwrap();
        assert_eq!(d.index_class(), IndexClass { real: vec![], imaginary: vec![0] });
    }

    #[test]
    fn symmetrizable_example_from_the_contract_is_actually_valid() {
        // r0 a01 = 2·(-1) = -2 and r1 a10 = 1·(-2) = -2, so [2,1] works.
        let a = vec![vec![2, -1], vec![-2, 0]];
        assert!(brute_force_symmetrizer(&a, 6).is_some());
        assert!(BorcherdsCartanDatum::new(labels(2), a, vec![2, 1], None).is_ok());
    }

    #[test]
    fn not_symmetrizable() {
        // cycle 0-1-2 forces r0 = r1 = r2 and r0 = 2 r2
        let a = vec![vec![2, -1, -1], vec![-1, 2, -1], vec![-2, -1, 2]];
        assert_eq!(brute_force_symmetrizer(&a, 8), None);
        assert_eq!(find_symmetrizer(&a), None);
        let err = BorcherdsCartanDatum::new(labels(3), a, vec![1, 1, 1], None).unwrap_err();
        assert_eq!(err.kind(), "NotSymmetrizable");

        let a = vec![vec![2, 0], vec![-1, 2]];
        assert_eq!(brute_force_symmetrizer(&a, 8), None);
        assert_eq!(find_symmetrizer(&a), None);
    }

    #[test]
    fn error_taxonomy() {
        let e = BorcherdsCartanDatum::new(labels(1), vec![vec![1]], vec![1], None).unwrap_err();
        assert_eq!(e.kind(), "OddDiagonal");
        let e = BorcherdsCartanDatum::new(labels(1), vec![vec![4]], vec![1], None).unwrap_err();
        assert_eq!(e.kind(), "OddDiagonal");
        let e = BorcherdsCartanDatum::new(labels(2), vec![vec![2, 1], vec![1, 2]], vec![1, 1], None)
            .unwrap_err();
        assert_eq!(e.kind(), "PositiveOffDiagonal");
        let e = BorcherdsCartanDatum::new(
            labels(2),
            vec![vec![2, -1], vec![-1, 2]],
            vec![1, 1],
            Some(vec![]),
        )
        .unwrap_err();
        assert_eq!(e.kind(), "BadOrientation");
        let e = BorcherdsCartanDatum::new(
            labels(2),
            vec![vec![2, -1], vec![-1, 2]],
            vec![1, 1],
            Some(vec![("i0".into(), "i1".into()), ("i1".into(), "i0".into())]),
        )
        .unwrap_err();
        assert_eq!(e.kind(), "BadOrientation");
        let e = BorcherdsCartanDatum::new(
            labels(2),
            vec![vec![2, 0], vec![0, 2]],
            vec![1, 1],
            Some(vec![("i0".into(), "i1".into())]),
        )
        .unwrap_err();
        assert_eq!(e.kind(), "BadOrientation");
    }

    #[test]
    fn bilinear_examples() {
        let d = BorcherdsCartanDatum::new(labels(1), vec![vec![2]], vec![1], None).unwrap();
        assert_eq!(d.bilinear(0, 0), 2);
        let d = BorcherdsCartanDatum::new(labels(1), vec![vec![-2]], vec![3], None).unwrap();
        assert_eq!(d.bilinear(0, 0), -6);
        let d = BorcherdsCartanDatum::new(labels(2), vec![vec![2, 0], vec![0, 2]], vec![1, 1], None)
            .unwrap();
        assert_eq!(d.bilinear(0, 1), 0);
    }

    #[test]
    fn symmetrizer_examples() {
        assert_eq!(find_symmetrizer(&[vec![2, -1], vec![-1, 2]]), Some(vec![1, 1]));
        assert_eq!(find_symmetrizer(&[vec![2, -2], vec![-1, 2]]), Some(vec![1, 2]));
        assert_eq!(find_symmetrizer(&[vec![2, -1], vec![-1, 0]]), Some(vec![1, 1]));
        // disconnected components are normalized independently
        assert_eq!(
            find_symmetrizer(&[vec![2, -2, 0], vec![-1, 2, 0], vec![0, 0, -4]]),
            Some(vec![1, 2, 1])
        );
    }

    #[test]
    fn default_orientation_goes_up() {
        let d = BorcherdsCartanDatum::from_matrix(vec![
            vec![2, -1, 0],
            vec![-1, 0, -1],
            vec![0, -1, 2],
        ])
        .unwrap();
        let edges: Vec<_> = d.orientation().collect();
        assert_eq!(edges, vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn json_round_trip_and_missing_symmetrizer() {
        let text = r#"{"indices":["i","j"],"A":[[2,-2],[-1,2]]}"#;
        let d = BorcherdsCartanDatum::from_json(text).unwrap();
        assert_eq!(d.symmetrizer(), &[1, 2]);
        let again = BorcherdsCartanDatum::from_json(&d.to_json()).unwrap();
        assert_eq!(again, d);
        assert_eq!(
            BorcherdsCartanDatum::from_json(r#"{"indices":["i"],"A":[[2]],"X":1}"#)
                .unwrap_err()
                .kind(),
            "Parse"
        );
    }

    use proptest::prelude::*;

    fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..=3).prop_flat_map(|n| {
            (
                proptest::collection::vec(prop_oneof![Just(2i64), Just(0), Just(-2), Just(-4)], n),
                proptest::collection::vec(-3i64..=0, n * n),
            )
                .prop_map(move |(diag, off)| {
                    (0..n)
                        .map(|i| {
                            (0..n)
                                .map(|j| if i == j { diag[i] } else { off[i * n + j] })
                                .collect()
                        })
                        .collect()
                })
        })
    }

    proptest! {
        #[test]
        fn found_symmetrizers_validate(a in small_matrix()) {
            if let Some(d) = find_symmetrizer(&a) {
                let datum = BorcherdsCartanDatum::new(labels(a.len()), a.clone(), d, None);
                prop_assert!(datum.is_ok());
                let datum = datum.unwrap();
                for i in 0..a.len() {
                    for j in 0..a.len() {
                        prop_assert_eq!(datum.bilinear(i, j), datum.bilinear(j, i));
                    }
                }
                let again = BorcherdsCartanDatum::from_json(&datum.to_json()).unwrap();
                prop_assert_eq!(again, datum);
            } else {
                prop_assert!(brute_force_symmetrizer(&a, 6).is_none());
            }
        }
    }
}
