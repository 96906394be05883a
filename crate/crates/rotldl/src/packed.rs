//! Packed upper-triangle storage for symmetric matrices.

/// Dense vector of `f64` entries; right-hand sides, solutions and generator
/// outputs are all plain vectors.
pub type DenseVector = Vec<f64>;

/// Offset of entry `(i, j)` in row-major packed upper-triangle storage of an
/// `n`-dimensional symmetric matrix.
///
/// The indices are canonicalized so the smaller acts as the row, making the
/// map a bijection from unordered index pairs onto `0..n*(n+1)/2`.
#[inline]
pub fn packed_index(i: usize, j: usize, n: usize) -> usize {
    assert!(
        i < n && j < n,
        "index ({i}, {j}) out of range for dimension {n}"
    );
    let (r, c) = if i <= j { (i, j) } else { (j, i) };
    r * n - r * (r + 1) / 2 + c
}

/// Unchecked variant used by the factorization kernels.
#[inline(always)]
pub(crate) fn pidx(i: usize, j: usize, n: usize) -> usize {
    let (r, c) = if i <= j { (i, j) } else { (j, i) };
    r * n - r * (r + 1) / 2 + c
}

/// Symmetric matrix stored as its upper triangle, row major with `j >= i`.
///
/// Symmetry is implicit in the storage; the accessors canonicalize index
/// pairs, so `get(i, j) == get(j, i)` always holds.
#[derive(Clone, Debug, PartialEq)]
pub struct PackedSymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl PackedSymMatrix {
    /// Zero matrix of dimension `n`.
    pub fn zeros(n: usize) -> Self {
        PackedSymMatrix {
            n,
            data: vec![0.0; n * (n + 1) / 2],
        }
    }

    /// Wraps an existing packed upper triangle (row major, `j >= i`).
    pub fn from_packed(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(
            data.len(),
            n * (n + 1) / 2,
            "packed data length must be n(n+1)/2"
        );
        PackedSymMatrix { n, data }
    }

    /// Builds from full rows, taking the upper triangle. The rows must form a
    /// symmetric matrix; the lower triangle is checked against the upper.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut m = PackedSymMatrix::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "row {i} has wrong length");
            for (j, &v) in row.iter().enumerate() {
                if j >= i {
                    m.set(i, j, v);
                } else {
                    assert_eq!(rows[j][i], v, "rows are not symmetric at ({i}, {j})");
                }
            }
        }
        m
    }

    /// Matrix dimension.
    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[packed_index(i, j, self.n)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[packed_index(i, j, self.n)] = v;
    }

    /// Packed storage, row major upper triangle.
    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Largest entry in absolute value.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Full-matrix Frobenius norm; off-diagonal entries count twice.
    pub fn frobenius_norm(&self) -> f64 {
        let mut sum = 0.0;
        let mut pos = 0;
        for i in 0..self.n {
            sum += self.data[pos] * self.data[pos];
            for k in 1..self.n - i {
                sum += 2.0 * self.data[pos + k] * self.data[pos + k];
            }
            pos += self.n - i;
        }
        sum.sqrt()
    }
}

/// `y = A x` using the packed accessor.
pub fn sym_matvec(a: &PackedSymMatrix, x: &[f64]) -> DenseVector {
    let n = a.dim();
    assert_eq!(x.len(), n, "vector length must match matrix dimension");
    let data = a.as_slice();
    let mut y = vec![0.0; n];
    let mut pos = 0;
    for i in 0..n {
        let row = &data[pos..pos + n - i];
        let mut acc = row[0] * x[i];
        for (k, &v) in row.iter().enumerate().skip(1) {
            acc += v * x[i + k];
            y[i + k] += v * x[i];
        }
        y[i] += acc;
        pos += n - i;
    }
    y
}

/// Full-matrix Frobenius norm of `A - B`; off-diagonal entries count twice.
pub fn frobenius_diff(a: &PackedSymMatrix, b: &PackedSymMatrix) -> f64 {
    assert_eq!(a.dim(), b.dim(), "dimension mismatch");
    let n = a.dim();
    let (da, db) = (a.as_slice(), b.as_slice());
    let mut sum = 0.0;
    let mut pos = 0;
    for i in 0..n {
        let d = da[pos] - db[pos];
        sum += d * d;
        for k in 1..n - i {
            let d = da[pos + k] - db[pos + k];
            sum += 2.0 * d * d;
        }
        pos += n - i;
    }
    sum.sqrt()
}

/// Euclidean norm.
pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Small dense square matrix, row major. Used for the random orthogonal
/// factors of the spectral generators and as scratch in tests.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = DenseMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// `y = M x`.
    pub fn matvec(&self, x: &[f64]) -> DenseVector {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `y = M^t x`.
    pub fn matvec_t(&self, x: &[f64]) -> DenseVector {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let xi = x[i];
            for (yj, &m) in y.iter_mut().zip(self.row(i)) {
                *yj += m * xi;
            }
        }
        y
    }
}
