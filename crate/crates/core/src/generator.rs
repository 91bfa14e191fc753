//! Stochastic generators `F = [[A, B], [C, D − I]]` on `h ⊕ (h⊗k)` and the
//! quadratic maps that classify the cocycles they generate.
//!
//! `h⊗k` is laid out in Kronecker order: basis vector `e_x ⊗ e_i` sits at
//! index `x·m + i`. `Δ` is the projection `diag(0_n, I_{nm})`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{herm_eig, is_nsd, ComplexMatrix, C64};
use crate::sampling::Sampler;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GeneratorRepr", into = "GeneratorRepr")]
pub struct Generator {
    dim_h: usize,
    dim_k: usize,
    a: ComplexMatrix,
    b: ComplexMatrix,
    c: ComplexMatrix,
    d: ComplexMatrix,
}

/// Wire form. `D` is stored as-is, not as `D − I`.
#[derive(Serialize, Deserialize)]
struct GeneratorRepr {
    dim_h: usize,
    dim_k: usize,
    #[serde(rename = "A")]
    a: ComplexMatrix,
    #[serde(rename = "B")]
    b: ComplexMatrix,
    #[serde(rename = "C")]
    c: ComplexMatrix,
    #[serde(rename = "D")]
    d: ComplexMatrix,
}

impl TryFrom<GeneratorRepr> for Generator {
    type Error = Error;
    fn try_from(r: GeneratorRepr) -> Result<Self> {
        Generator::new(r.dim_h, r.dim_k, r.a, r.b, r.c, r.d)
    }
}

impl From<Generator> for GeneratorRepr {
    fn from(g: Generator) -> Self {
        GeneratorRepr { dim_h: g.dim_h, dim_k: g.dim_k, a: g.a, b: g.b, c: g.c, d: g.d }
    }
}

fn expect_shape(name: &str, m: &ComplexMatrix, rows: usize, cols: usize) -> Result<()> {
    if m.shape() != (rows, cols) {
        return Err(Error::DimMismatch(format!(
            "block {name} is {}x{}, expected {rows}x{cols}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

impl Generator {
    pub fn new(
        dim_h: usize,
        dim_k: usize,
        a: ComplexMatrix,
        b: ComplexMatrix,
        c: ComplexMatrix,
        d: ComplexMatrix,
    ) -> Result<Self> {
        if dim_h == 0 || dim_k == 0 {
            return Err(Error::DimMismatch(format!("dimensions must be positive, got ({dim_h}, {dim_k})")));
        }
        let nm = dim_h * dim_k;
        expect_shape("A", &a, dim_h, dim_h)?;
        expect_shape("B", &b, dim_h, nm)?;
        expect_shape("C", &c, nm, dim_h)?;
        expect_shape("D", &d, nm, nm)?;
        Ok(Self { dim_h, dim_k, a, b, c, d })
    }

    /// The zero generator (`D = I`), which generates the identity cocycle.
    pub fn zero(dim_h: usize, dim_k: usize) -> Self {
        let nm = dim_h * dim_k;
        Self {
            dim_h,
            dim_k,
            a: ComplexMatrix::zeros(dim_h, dim_h),
            b: ComplexMatrix::zeros(dim_h, nm),
            c: ComplexMatrix::zeros(nm, dim_h),
            d: ComplexMatrix::identity(nm),
        }
    }

    /// Splits a full `n(1+m)` square matrix back into blocks.
    pub fn from_full(dim_h: usize, dim_k: usize, full: &ComplexMatrix) -> Result<Self> {
        let size = dim_h * (1 + dim_k);
        expect_shape("full(F)", full, size, size)?;
        let nm = dim_h * dim_k;
        let d_minus_i = full.block(dim_h, dim_h, nm, nm);
        Self::new(
            dim_h,
            dim_k,
            full.block(0, 0, dim_h, dim_h),
            full.block(0, dim_h, dim_h, nm),
            full.block(dim_h, 0, nm, dim_h),
            &d_minus_i + &ComplexMatrix::identity(nm),
        )
    }

    /// `from_full` on a real literal, e.g. `[[a, b], [c, d − 1]]`.
    pub fn from_full_real(dim_h: usize, dim_k: usize, rows: &[&[f64]]) -> Result<Self> {
        Self::from_full(dim_h, dim_k, &ComplexMatrix::from_real(rows))
    }

    /// Direct sum over the joint eigenbasis `basis` of scalar-`h` fibres:
    /// every block becomes `Σ_x P_x ⊗ fibre_x`, so all components commute.
    pub fn from_fibres(basis: &ComplexMatrix, fibres: &[Generator]) -> Result<Self> {
        let n = basis.rows();
        if !basis.is_square() || fibres.len() != n {
            return Err(Error::DimMismatch(format!("{} fibres for a {}x{} basis", fibres.len(), n, basis.cols())));
        }
        let m = fibres[0].dim_k;
        if fibres.iter().any(|f| f.dim_h != 1 || f.dim_k != m) {
            return Err(Error::DimMismatch("fibres must share dim_k and have dim_h = 1".into()));
        }
        let mut out = Self {
            dim_h: n,
            dim_k: m,
            a: ComplexMatrix::zeros(n, n),
            b: ComplexMatrix::zeros(n, n * m),
            c: ComplexMatrix::zeros(n * m, n),
            d: ComplexMatrix::zeros(n * m, n * m),
        };
        for (x, fibre) in fibres.iter().enumerate() {
            let u = ComplexMatrix::column_vector(&basis.column(x));
            let p = u.matmul(&u.adjoint());
            out.a += &p.kron(&fibre.a);
            out.b += &p.kron(&fibre.b);
            out.c += &p.kron(&fibre.c);
            out.d += &p.kron(&fibre.d);
        }
        Ok(out)
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn dim_k(&self) -> usize {
        self.dim_k
    }

    /// `n(1+m)`, the dimension of `h ⊗ k̂`.
    pub fn size(&self) -> usize {
        self.dim_h * (1 + self.dim_k)
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }

    pub fn c(&self) -> &ComplexMatrix {
        &self.c
    }

    pub fn d(&self) -> &ComplexMatrix {
        &self.d
    }

    pub fn d_minus_identity(&self) -> ComplexMatrix {
        &self.d - &ComplexMatrix::identity(self.dim_h * self.dim_k)
    }

    pub fn full(&self) -> ComplexMatrix {
        ComplexMatrix::from_2x2_blocks(&self.a, &self.b, &self.c, &self.d_minus_identity())
    }

    /// Generator whose full form is `full(F)*`.
    pub fn adjoint(&self) -> Self {
        Self {
            dim_h: self.dim_h,
            dim_k: self.dim_k,
            a: self.a.adjoint(),
            b: self.c.adjoint(),
            c: self.b.adjoint(),
            d: self.d.adjoint(),
        }
    }

    /// `1 + ‖full(F)‖`, the scale of every residual test on `F`.
    pub fn scale(&self) -> f64 {
        1.0 + self.full().norm()
    }

    pub fn same_dims(&self, other: &Generator) -> Result<()> {
        if (self.dim_h, self.dim_k) != (other.dim_h, other.dim_k) {
            return Err(Error::DimMismatch(format!(
                "generators have dims ({}, {}) and ({}, {})",
                self.dim_h, self.dim_k, other.dim_h, other.dim_k
            )));
        }
        Ok(())
    }

    pub fn distance(&self, other: &Generator) -> f64 {
        self.full().distance(&other.full())
    }

    /// Index of `e_α ⊗ e_x` inside `h ⊕ (h⊗k)`.
    fn full_index(&self, alpha: usize, x: usize) -> usize {
        if alpha == 0 {
            x
        } else {
            self.dim_h + x * self.dim_k + (alpha - 1)
        }
    }

    /// The `(1+m)²` blocks `F^α_β ∈ B(h)` with respect to `e_0, e_1 … e_m`.
    pub fn components(&self) -> Components {
        let full = self.full();
        let n = self.dim_h;
        let blocks = (0..=self.dim_k)
            .map(|alpha| {
                (0..=self.dim_k)
                    .map(|beta| {
                        ComplexMatrix::from_fn(n, n, |x, y| full[(self.full_index(alpha, x), self.full_index(beta, y))])
                    })
                    .collect()
            })
            .collect();
        Components { dim_h: n, dim_k: self.dim_k, blocks }
    }

    pub fn from_components(components: &Components) -> Result<Self> {
        let (n, m) = (components.dim_h, components.dim_k);
        if components.blocks.len() != m + 1
            || components.blocks.iter().any(|row| row.len() != m + 1)
            || components.blocks.iter().flatten().any(|b| b.shape() != (n, n))
        {
            return Err(Error::DimMismatch("component table has the wrong shape".into()));
        }
        let skeleton = Self::zero(n, m);
        let mut full = ComplexMatrix::zeros(skeleton.size(), skeleton.size());
        for (alpha, row) in components.blocks.iter().enumerate() {
            for (beta, block) in row.iter().enumerate() {
                for x in 0..n {
                    for y in 0..n {
                        full[(skeleton.full_index(alpha, x), skeleton.full_index(beta, y))] = block[(x, y)];
                    }
                }
            }
        }
        Self::from_full(n, m, &full)
    }
}

/// Component table `F^α_β`, indexed `blocks[α][β]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Components {
    pub dim_h: usize,
    pub dim_k: usize,
    pub blocks: Vec<Vec<ComplexMatrix>>,
}

impl Components {
    pub fn get(&self, alpha: usize, beta: usize) -> &ComplexMatrix {
        &self.blocks[alpha][beta]
    }
}

/// `Δ = diag(0_n, I_{nm})`.
pub fn delta(dim_h: usize, dim_k: usize) -> ComplexMatrix {
    let size = dim_h * (1 + dim_k);
    ComplexMatrix::from_fn(size, size, |i, j| if i == j && i >= dim_h { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

/// `X·Δ·Y` without forming `Δ`: only the `h⊗k` rows/columns contribute.
fn through_delta(x: &ComplexMatrix, y: &ComplexMatrix, dim_h: usize) -> ComplexMatrix {
    let size = x.rows();
    let inner = x.cols() - dim_h;
    x.block(0, dim_h, size, inner).matmul(&y.block(dim_h, 0, inner, y.cols()))
}

/// `χ(F) = F + F* + F*ΔF`.
pub fn chi(f: &Generator) -> ComplexMatrix {
    let full = f.full();
    let adj = full.adjoint();
    &(&full + &adj) + &through_delta(&adj, &full, f.dim_h)
}

/// `π(F) = F + F* + F*ΔF + FΔF + FΔF* + FΔF*ΔF`.
pub fn pi_map(f: &Generator) -> ComplexMatrix {
    let full = f.full();
    let adj = full.adjoint();
    let n = f.dim_h;
    let adj_d_full = through_delta(&adj, &full, n);
    let mut out = &full + &adj;
    out += &adj_d_full;
    out += &through_delta(&full, &full, n);
    out += &through_delta(&full, &adj, n);
    out += &through_delta(&full, &adj_d_full, n);
    out
}

/// `φ(F) = χ(F) + χ(F)Δχ(F)`.
pub fn phi_map(f: &Generator) -> ComplexMatrix {
    let x = chi(f);
    &x + &through_delta(&x, &x, f.dim_h)
}

/// Generator of the product cocycle `X^F X^G`: `F + G + FΔG`.
///
/// The commutation hypothesis on `F` and `X^G` is the caller's responsibility.
pub fn compose(f: &Generator, g: &Generator) -> Result<Generator> {
    f.same_dims(g)?;
    let ff = f.full();
    let gf = g.full();
    let full = &(&ff + &gf) + &through_delta(&ff, &gf, f.dim_h);
    Generator::from_full(f.dim_h, f.dim_k, &full)
}

/// Names one component block, possibly adjointed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentRef {
    pub alpha: usize,
    pub beta: usize,
    pub adjoint: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FailingPair {
    pub first: ComponentRef,
    pub second: ComponentRef,
    pub commutator_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommutationVerdict {
    pub holds: bool,
    pub max_commutator: f64,
    pub failing_pair: Option<FailingPair>,
}

/// Pairwise commutation of the component blocks (and their adjoints when
/// `include_adjoints`), each commutator measured against `tol·(1+‖F‖)`.
pub fn commutes_componentwise(f: &Generator, include_adjoints: bool, tol: f64) -> CommutationVerdict {
    let comps = f.components();
    let threshold = tol * f.scale();
    let mut family: Vec<(ComponentRef, ComplexMatrix)> = Vec::new();
    for alpha in 0..=f.dim_k {
        for beta in 0..=f.dim_k {
            let block = comps.get(alpha, beta);
            family.push((ComponentRef { alpha, beta, adjoint: false }, block.clone()));
            if include_adjoints {
                family.push((ComponentRef { alpha, beta, adjoint: true }, block.adjoint()));
            }
        }
    }

    let mut max_commutator: f64 = 0.0;
    let mut failing_pair = None;
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            let norm = family[i].1.commutator(&family[j].1).norm();
            max_commutator = max_commutator.max(norm);
            if failing_pair.is_none() && norm > threshold {
                failing_pair = Some(FailingPair { first: family[i].0, second: family[j].0, commutator_norm: norm });
            }
        }
    }
    CommutationVerdict { holds: failing_pair.is_none(), max_commutator, failing_pair }
}

/// One class verdict with its numeric witness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassVerdict {
    pub verdict: bool,
    pub witness: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub failing_pair: Option<FailingPair>,
}

impl ClassVerdict {
    fn plain(verdict: bool, witness: f64) -> Self {
        Self { verdict, witness, failing_pair: None }
    }
}

/// Verdicts for every cocycle class, always all evaluated.
///
/// Witnesses: `contraction` the top eigenvalue of `χ(F)`; `isometry`,
/// `coisometry`, `adjoint_equals_time_reversed`, `projection` and
/// `partial_isometry` the norm of the defining residual; commutation-based
/// classes the largest commutator; `positive` the bottom eigenvalue of
/// `ΔFΔ + Δ`; `positive_contraction` the top eigenvalue of `F`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub contraction: ClassVerdict,
    pub isometry: ClassVerdict,
    pub coisometry: ClassVerdict,
    pub unitary: ClassVerdict,
    pub left_and_right: ClassVerdict,
    pub adjoint_equals_time_reversed: ClassVerdict,
    pub self_adjoint: ClassVerdict,
    pub positive: ClassVerdict,
    pub positive_contraction: ClassVerdict,
    pub projection: ClassVerdict,
    pub partial_isometry: ClassVerdict,
}

impl ClassificationReport {
    /// `(name, verdict)` in report order.
    pub fn entries(&self) -> [(&'static str, &ClassVerdict); 11] {
        [
            ("contraction", &self.contraction),
            ("isometry", &self.isometry),
            ("coisometry", &self.coisometry),
            ("unitary", &self.unitary),
            ("left_and_right", &self.left_and_right),
            ("adjoint_equals_time_reversed", &self.adjoint_equals_time_reversed),
            ("self_adjoint", &self.self_adjoint),
            ("positive", &self.positive),
            ("positive_contraction", &self.positive_contraction),
            ("projection", &self.projection),
            ("partial_isometry", &self.partial_isometry),
        ]
    }

    /// The implication chain every report must satisfy.
    pub fn implications_hold(&self) -> bool {
        self.unitary.verdict == (self.isometry.verdict && self.coisometry.verdict)
            && (!self.projection.verdict || self.positive_contraction.verdict)
            && (!self.positive_contraction.verdict || self.contraction.verdict)
    }
}

/// Classifies the cocycle generated by `F` by its generator-side criteria.
pub fn classify(f: &Generator, tol: f64) -> Result<ClassificationReport> {
    let scale = f.scale();
    let threshold = tol * scale;
    let full = f.full();

    let chi_f = chi(f);
    let (contraction, chi_top) = is_nsd(&chi_f.hermitian_part(), tol)?;
    let chi_norm = chi_f.norm();
    let chi_adj_norm = chi(&f.adjoint()).norm();
    let isometry = ClassVerdict::plain(chi_norm <= threshold, chi_norm);
    let coisometry = ClassVerdict::plain(chi_adj_norm <= threshold, chi_adj_norm);
    let unitary = ClassVerdict::plain(isometry.verdict && coisometry.verdict, chi_norm.max(chi_adj_norm));

    let plain_comm = commutes_componentwise(f, false, tol);
    let vn_comm = commutes_componentwise(f, true, tol);
    let left_and_right = ClassVerdict {
        verdict: plain_comm.holds,
        witness: plain_comm.max_commutator,
        failing_pair: plain_comm.failing_pair,
    };

    let asymmetry = full.hermitian_defect();
    let hermitian = asymmetry <= threshold;
    let adjoint_equals_time_reversed = ClassVerdict::plain(hermitian, asymmetry);
    let self_adjoint = ClassVerdict {
        verdict: hermitian && vn_comm.holds,
        witness: asymmetry.max(vn_comm.max_commutator),
        failing_pair: vn_comm.failing_pair,
    };

    // ΔFΔ + Δ = diag(0, D)
    let gauge = {
        let mut m = ComplexMatrix::zeros(f.size(), f.size());
        m.set_block(f.dim_h, f.dim_h, &f.d);
        m
    };
    let gauge_bottom = herm_eig(&gauge.hermitian_part(), tol)?.min_eigenvalue();
    let positive = ClassVerdict::plain(
        self_adjoint.verdict && gauge_bottom >= -tol * (1.0 + gauge.norm()),
        gauge_bottom,
    );
    let (nonpositive, f_top) = is_nsd(&full.hermitian_part(), tol)?;
    let positive_contraction = ClassVerdict::plain(positive.verdict && nonpositive && contraction, f_top);

    let projection_residual = (&full + &through_delta(&full.adjoint(), &full, f.dim_h)).norm();
    let projection = ClassVerdict {
        verdict: vn_comm.holds && projection_residual <= threshold && positive_contraction.verdict,
        witness: projection_residual,
        failing_pair: vn_comm.failing_pair,
    };
    let pi_norm = pi_map(f).norm();
    let partial_isometry = ClassVerdict {
        verdict: vn_comm.holds && pi_norm <= threshold,
        witness: pi_norm,
        failing_pair: vn_comm.failing_pair,
    };

    Ok(ClassificationReport {
        contraction: ClassVerdict::plain(contraction, chi_top),
        isometry,
        coisometry,
        unitary,
        left_and_right,
        adjoint_equals_time_reversed,
        self_adjoint,
        positive,
        positive_contraction,
        projection,
        partial_isometry,
    })
}

/// Completely-positive-form data of a positive generator.
#[derive(Debug, Clone, PartialEq)]
pub struct CpForm {
    /// `K = [A/2  B]`, an `n × n(1+m)` matrix.
    pub k: ComplexMatrix,
    /// `D`, defining `ψ(a) = diag(0, D(a ⊗ I_k))`.
    pub psi_block: ComplexMatrix,
    /// Largest residual of `F(a⊗I) = ψ(a) + E_0 a K + K* a E^0 − a⊗P_k` over the probes.
    pub residual: f64,
}

const CP_PROBES: usize = 10;
const CP_PROBE_SEED: u64 = 0x00C0_FFEE;

/// Builds `K` and `ψ` for a positive generator and checks the
/// completely-positive decomposition on random elements of the component algebra.
pub fn cp_form(f: &Generator, tol: f64) -> Result<CpForm> {
    let report = classify(f, tol)?;
    if !report.positive.verdict {
        return Err(Error::NotPositiveGenerator(format!(
            "self-adjoint cocycle: {}, bottom of spectrum of D: {:e}",
            report.self_adjoint.verdict, report.positive.witness
        )));
    }
    let n = f.dim_h;
    let m = f.dim_k;
    let half_a = f.a.scale_real(0.5);
    let k = ComplexMatrix::from_fn(n, f.size(), |i, j| if j < n { half_a[(i, j)] } else { f.b[(i, j - n)] });
    let probes = algebra_probes(f, tol)?;
    let full = f.full();
    let id_k = ComplexMatrix::identity(m);

    let mut residual: f64 = 0.0;
    for a in &probes {
        let a_k = a.kron(&id_k);
        let mut ampl = ComplexMatrix::zeros(f.size(), f.size());
        ampl.set_block(0, 0, a);
        ampl.set_block(n, n, &a_k);
        let lhs = full.matmul(&ampl);

        let mut rhs = ComplexMatrix::zeros(f.size(), f.size());
        rhs.set_block(n, n, &(&f.d.matmul(&a_k) - &a_k));
        let top = a.matmul(&k);
        let left = k.adjoint().matmul(a);
        for i in 0..n {
            for j in 0..f.size() {
                rhs[(i, j)] += top[(i, j)];
                rhs[(j, i)] += left[(j, i)];
            }
        }
        residual = residual.max(lhs.distance(&rhs));
    }
    let scale = f.scale();
    if residual > tol * scale {
        return Err(Error::NotPositiveGenerator(format!(
            "completely positive form residual {residual:e} exceeds {:e}",
            tol * scale
        )));
    }
    Ok(CpForm { k, psi_block: f.d.clone(), residual })
}

/// Random Hermitian contractions in the von Neumann algebra generated by the components.
///
/// A generic real combination of the Hermitian parts of the components has
/// eigenspaces on which every component acts as a scalar; functions of its
/// spectral projections therefore stay inside the (commutative) algebra.
fn algebra_probes(f: &Generator, tol: f64) -> Result<Vec<ComplexMatrix>> {
    let mut sampler = Sampler::new(CP_PROBE_SEED);
    let comps = f.components();
    let n = f.dim_h;
    let mut generic = ComplexMatrix::zeros(n, n);
    for block in comps.blocks.iter().flatten() {
        generic += &block.hermitian_part().scale_real(sampler.uniform_in(0.5, 1.5));
        let skew = (block - &block.adjoint()).scale(C64::new(0.0, -0.5));
        generic += &skew.scale_real(sampler.uniform_in(0.5, 1.5));
    }
    let eig = herm_eig(&generic.hermitian_part(), tol)?;

    // Group numerically equal eigenvalues so degenerate eigenspaces get one value.
    let spread = eig.max_eigenvalue() - eig.min_eigenvalue();
    let gap = 1e-8 * (1.0 + spread);
    let mut cluster = vec![0usize; n];
    for i in 1..n {
        cluster[i] = cluster[i - 1] + usize::from(eig.eigenvalues[i] - eig.eigenvalues[i - 1] > gap);
    }
    let clusters = cluster[n - 1] + 1;

    Ok((0..CP_PROBES)
        .map(|_| {
            let per_cluster: Vec<f64> = (0..clusters).map(|_| sampler.uniform_in(-1.0, 1.0)).collect();
            let values: Vec<f64> = cluster.iter().map(|&c| per_cluster[c]).collect();
            eig.synthesize(&values)
        })
        .collect())
}
