use nalgebra::{DMatrix, SymmetricEigen};

/// Symmetrized second moments V_ij = ½⟨u_i u_j + u_j u_i⟩ of the
/// quadrature fluctuations. Vacuum has ½ on the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix(DMatrix<f64>);

impl CovarianceMatrix {
    pub fn new(matrix: DMatrix<f64>) -> Self {
        Self(matrix)
    }

    /// Vacuum state of `modes` bosonic modes.
    pub fn vacuum(modes: usize) -> Self {
        Self(DMatrix::identity(2 * modes, 2 * modes) * 0.5)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn variance(&self, index: usize) -> f64 {
        self.0[(index, index)]
    }

    pub fn variances(&self) -> Vec<f64> {
        self.0.diagonal().iter().copied().collect()
    }

    /// 2×2 block of mode `mode` (0 = cavity, 1 = magnon, 2 = mechanics).
    pub fn mode_block(&self, mode: usize) -> [[f64; 2]; 2] {
        let i = 2 * mode;
        [
            [self.0[(i, i)], self.0[(i, i + 1)]],
            [self.0[(i + 1, i)], self.0[(i + 1, i + 1)]],
        ]
    }

    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        let scale = self.0.amax().max(f64::MIN_POSITIVE);
        (&self.0 - self.0.transpose()).amax() <= rel_tol * scale
    }

    pub fn is_positive_definite(&self) -> bool {
        self.0.clone().cholesky().is_some()
    }

    /// V_XX·V_YY − V_XY² for each mode.
    pub fn mode_determinants(&self) -> Vec<f64> {
        (0..self.dim() / 2)
            .map(|k| {
                let b = self.mode_block(k);
                b[0][0] * b[1][1] - b[0][1] * b[1][0]
            })
            .collect()
    }

    /// Per-mode uncertainty V_XX·V_YY − V_XY² ≥ ¼ (up to `rel_tol`).
    pub fn satisfies_mode_uncertainty(&self, rel_tol: f64) -> bool {
        self.mode_determinants()
            .into_iter()
            .all(|det| det >= 0.25 * (1.0 - rel_tol))
    }

    /// Smallest eigenvalue of V + (i/2)Ω_symp, evaluated on its real
    /// symmetric embedding [[V, −K], [K, V]] with K = Ω_symp/2.
    pub fn robertson_schrodinger_margin(&self) -> f64 {
        let n = self.dim();
        let mut k = DMatrix::zeros(n, n);
        for mode in 0..n / 2 {
            k[(2 * mode, 2 * mode + 1)] = 0.5;
            k[(2 * mode + 1, 2 * mode)] = -0.5;
        }
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        let sym = (&self.0 + self.0.transpose()) * 0.5;
        m.view_mut((0, 0), (n, n)).copy_from(&sym);
        m.view_mut((n, n), (n, n)).copy_from(&sym);
        m.view_mut((0, n), (n, n)).copy_from(&(-&k));
        m.view_mut((n, 0), (n, n)).copy_from(&k);
        SymmetricEigen::new(m).eigenvalues.min()
    }

    pub fn is_physical(&self, rel_tol: f64) -> bool {
        self.is_symmetric(rel_tol)
            && self.is_positive_definite()
            && self.satisfies_mode_uncertainty(rel_tol)
            && self.robertson_schrodinger_margin() >= -rel_tol * self.0.amax()
    }
}
