//! The couple / evolve / decouple pipeline and the OWI queries on its
//! output.
//!
//! Every principal `S` gets an ancilla `S'`. STEP 1 copies `S` into `S'`
//! with a controlled shift in the copy basis, STEP 2 applies the channel to
//! the principals, STEP 3 un-copies with the ancilla as control in the
//! reference basis, and the optional STEP 4 dephases everything in the
//! product reference basis. The OWI from `A` to `B` is then
//! `I(B : A'A | B')` on the final state.
//!
//! The ancilla side of each controlled shift uses the complex conjugate of
//! the principal's basis, so that `sum_i c_i |b_i>|b_i*>` is the maximally
//! correlated copy for any (possibly complex) basis.

use std::collections::BTreeMap;

use crate::bases::{copy_basis_for, Basis};
use crate::classical;
use crate::entropy::{cmi_subsets, mutual_information, EntropyTable, Marginals};
use crate::gates::{compose, controlled_shift, ChannelSpec, ShiftSign};
use crate::par::{self, Execution};
use crate::tensor::{
    ancilla_label, DensityOperator, DiagonalState, PureState, Register, Role, Subsystem,
};
use crate::{CMatrix, CVector, Error, Result, C64, DEFAULT_MAX_DIM};

/// Correlation (bits) above which an input cut triggers a warning.
const CORRELATION_WARN: f64 = 1e-9;

/// How the final state is read out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// STEP 1 to 3.
    #[default]
    Quantum,
    /// STEP 1 to 4: dephase in the reference bases before the measures.
    QuantumProject,
    /// Classical digit register: copy, permute, subtract mod d.
    Classical,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Quantum => "quantum",
            Mode::QuantumProject => "quantum_project",
            Mode::Classical => "classical",
        }
    }

    pub fn project_final(self) -> bool {
        self == Mode::QuantumProject
    }
}

/// State simulated by the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    /// State vector; mixed inputs are purified with environment systems.
    #[default]
    StateVector,
    /// Dense density operator.
    DensityMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Options {
    pub exec: Execution,
    pub engine: Engine,
    /// Cap on the doubled dimension `prod d^2` over principals.
    pub max_dim: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            exec: Execution::default(),
            engine: Engine::default(),
            max_dim: DEFAULT_MAX_DIM,
        }
    }
}

/// Input state of one group of principals.
#[derive(Debug, Clone, PartialEq)]
pub enum InputState {
    Pure(CVector),
    Mixed(CMatrix),
}

/// Joint input over `labels`, in that tensor order.
#[derive(Debug, Clone, PartialEq)]
pub struct InputGroup {
    pub labels: Vec<String>,
    pub state: InputState,
}

impl InputGroup {
    pub fn pure<L: AsRef<str>>(labels: &[L], amplitudes: CVector) -> Self {
        InputGroup {
            labels: labels.iter().map(|l| l.as_ref().to_string()).collect(),
            state: InputState::Pure(amplitudes),
        }
    }

    pub fn mixed<L: AsRef<str>>(labels: &[L], matrix: CMatrix) -> Self {
        InputGroup {
            labels: labels.iter().map(|l| l.as_ref().to_string()).collect(),
            state: InputState::Mixed(matrix),
        }
    }
}

/// OWI from `source` to `target`, optionally given `given`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub source: Vec<String>,
    pub target: Vec<String>,
    pub given: Vec<String>,
}

impl Query {
    pub fn new<L: AsRef<str>>(source: &[L], target: &[L]) -> Self {
        Query::given(source, target, &[] as &[&str])
    }

    pub fn given<L: AsRef<str>, G: AsRef<str>>(source: &[L], target: &[L], given: &[G]) -> Self {
        let own = |v: &[L]| v.iter().map(|l| l.as_ref().to_string()).collect();
        Query {
            source: own(source),
            target: own(target),
            given: given.iter().map(|l| l.as_ref().to_string()).collect(),
        }
    }

    /// `A,B->C|E` style label.
    pub fn describe(&self) -> String {
        let mut s = format!("{}->{}", self.source.join(","), self.target.join(","));
        if !self.given.is_empty() {
            s.push('|');
            s.push_str(&self.given.join(","));
        }
        s
    }
}

/// A fully specified experiment: principals, inputs, channel, explicit
/// bases (others are defaulted), mode and queries.
#[derive(Debug, Clone, PartialEq)]
pub struct Process {
    pub principals: Register,
    pub inputs: Vec<InputGroup>,
    pub channel: ChannelSpec,
    pub copy_bases: BTreeMap<String, Basis>,
    pub ref_bases: BTreeMap<String, Basis>,
    pub mode: Mode,
    pub queries: Vec<Query>,
}

impl Process {
    pub fn new(principals: Register, inputs: Vec<InputGroup>, channel: ChannelSpec) -> Self {
        Process {
            principals,
            inputs,
            channel,
            copy_bases: BTreeMap::new(),
            ref_bases: BTreeMap::new(),
            mode: Mode::Quantum,
            queries: Vec::new(),
        }
    }

    pub fn with_ref_basis(mut self, label: &str, basis: Basis) -> Self {
        self.ref_bases.insert(label.to_string(), basis);
        self
    }

    pub fn with_copy_basis(mut self, label: &str, basis: Basis) -> Self {
        self.copy_bases.insert(label.to_string(), basis);
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_query(mut self, query: Query) -> Self {
        self.queries.push(query);
        self
    }

    /// Doubled dimension `prod d^2` over the principals.
    pub fn doubled_dim(&self) -> usize {
        self.principals.doubled_dim()
    }

    pub fn check_capacity(&self, budget: usize) -> Result<()> {
        let required = self.doubled_dim();
        if required > budget {
            return Err(Error::Capacity { required, budget });
        }
        Ok(())
    }

    /// Run the pipeline and keep the final state for any number of queries.
    pub fn execute(&self, options: &Options) -> Result<Outcome> {
        self.check_capacity(options.max_dim)?;
        if self.mode == Mode::Classical {
            return classical::execute_process(self);
        }
        match options.engine {
            Engine::StateVector => {
                let input = prepare_vector(&self.principals, &self.inputs)?;
                let config = ProtocolConfig::resolve(self, &input)?;
                let warnings = config.notes();
                let fin = run_steps(&input, &self.channel, &config, options.exec)?;
                let state = if config.mode.project_final() {
                    FinalState::Diagonal(fin.dephase(&config.dephasing_bases())?)
                } else {
                    FinalState::Pure(fin)
                };
                Ok(Outcome::new(state, Some(input.into()), config, warnings))
            }
            Engine::DensityMatrix => {
                let input = prepare_density(&self.principals, &self.inputs)?;
                let config = ProtocolConfig::resolve(self, &input)?;
                let warnings = config.notes();
                let mut fin = run_steps(&input, &self.channel, &config, options.exec)?;
                if config.mode.project_final() {
                    fin = fin.dephase(&config.dephasing_bases())?;
                }
                Ok(Outcome::new(FinalState::Mixed(fin), Some(input.into()), config, warnings))
            }
        }
    }

    /// Evaluate every query.
    pub fn run(&self, options: &Options) -> Result<Vec<QueryResult>> {
        if self.queries.is_empty() {
            return Err(Error::MissingInput("no queries".to_string()));
        }
        let outcome = self.execute(options)?;
        self.queries
            .iter()
            .map(|q| outcome.query(q, options.exec))
            .collect()
    }
}

/// Resolved bases for every principal.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    pub copy_bases: BTreeMap<String, Basis>,
    pub ref_bases: BTreeMap<String, Basis>,
    pub mode: Mode,
}

/// Whether `rho` is `I/d` (every basis is then an eigenbasis).
fn fully_degenerate(rho: &CMatrix) -> bool {
    let d = rho.nrows();
    let inv = 1.0 / d as f64;
    rho.iter().enumerate().all(|(k, z)| {
        let target = if k % (d + 1) == 0 { inv } else { 0.0 };
        (z - C64::new(target, 0.0)).norm() <= 1e-9
    })
}

/// Whether `basis` diagonalizes `rho`.
fn is_eigenbasis(basis: &Basis, rho: &CMatrix) -> bool {
    let m = basis.columns().adjoint() * rho * basis.columns();
    let d = m.nrows();
    (0..d).all(|i| (0..d).all(|j| i == j || m[(i, j)].norm() <= 1e-9))
}

impl ProtocolConfig {
    /// Explicit bases from `process`, defaults elsewhere: the reference
    /// basis is computational; the copy basis is [`copy_basis_for`] of the
    /// input marginal, or the reference basis if that marginal is
    /// maximally mixed.
    pub fn resolve<S: Evolvable>(process: &Process, input: &S) -> Result<Self> {
        let mut copy_bases = BTreeMap::new();
        let mut ref_bases = BTreeMap::new();
        for label in process.ref_bases.keys().chain(process.copy_bases.keys()) {
            match process.principals.get(label) {
                Some(s) if s.role == Role::Principal => {}
                _ => return Err(Error::UnknownLabel(label.clone())),
            }
        }
        for s in process.principals.principals_iter() {
            let reference = match process.ref_bases.get(&s.label) {
                Some(b) => checked_dim(b, s)?,
                None => Basis::computational(s.dim)?,
            };
            let marginal = input.marginal(&s.label)?;
            let degenerate = fully_degenerate(marginal.matrix());
            let copy = match process.copy_bases.get(&s.label) {
                Some(b) => {
                    let b = checked_dim(b, s)?;
                    if !degenerate && is_eigenbasis(&b, marginal.matrix()) {
                        return Err(Error::CopyBasisIsEigenbasis(s.label.clone()));
                    }
                    b
                }
                None if degenerate => reference.clone(),
                None => copy_basis_for(&marginal)?,
            };
            copy_bases.insert(s.label.clone(), copy);
            ref_bases.insert(s.label.clone(), reference);
        }
        Ok(ProtocolConfig {
            copy_bases,
            ref_bases,
            mode: process.mode,
        })
    }

    fn copy(&self, label: &str) -> Result<&Basis> {
        self.copy_bases
            .get(label)
            .ok_or_else(|| Error::MissingBasis(label.to_string()))
    }

    fn reference(&self, label: &str) -> Result<&Basis> {
        self.ref_bases
            .get(label)
            .ok_or_else(|| Error::MissingBasis(label.to_string()))
    }

    /// Product reference basis for STEP 4: `ref` on principals, its
    /// conjugate on ancillas.
    pub fn dephasing_bases(&self) -> BTreeMap<String, Basis> {
        let mut out = BTreeMap::new();
        for (label, b) in &self.ref_bases {
            out.insert(label.clone(), b.clone());
            out.insert(ancilla_label(label), b.conjugate());
        }
        out
    }

    /// Metadata notes attached to every result of the run.
    fn notes(&self) -> Vec<String> {
        let high: Vec<&str> = self
            .ref_bases
            .iter()
            .filter(|(_, b)| b.dim() > 2)
            .map(|(l, _)| l.as_str())
            .collect();
        if high.is_empty() {
            return Vec::new();
        }
        vec![format!(
            "un-copy applied as G rho G^dagger on d>2 systems ({})",
            high.join(",")
        )]
    }
}

fn checked_dim(basis: &Basis, s: &Subsystem) -> Result<Basis> {
    if basis.dim() != s.dim {
        return Err(Error::DimensionMismatch {
            expected: s.dim,
            found: basis.dim(),
        });
    }
    Ok(basis.clone())
}

fn check_cover(principals: &Register, inputs: &[InputGroup]) -> Result<()> {
    let mut seen: Vec<&str> = Vec::new();
    for g in inputs {
        if g.labels.is_empty() {
            return Err(Error::EmptySelection);
        }
        for l in &g.labels {
            match principals.get(l) {
                Some(s) if s.role == Role::Principal => {}
                Some(_) => return Err(Error::NotPrincipal(l.clone())),
                None => return Err(Error::UnknownLabel(l.clone())),
            }
            if seen.contains(&l.as_str()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
            seen.push(l);
        }
    }
    for s in principals.principals_iter() {
        if !seen.contains(&s.label.as_str()) {
            return Err(Error::MissingInput(s.label.clone()));
        }
    }
    Ok(())
}

fn group_register(principals: &Register, labels: &[String]) -> Result<Register> {
    let mut subs = Vec::with_capacity(labels.len());
    for l in labels {
        let s = principals
            .get(l)
            .ok_or_else(|| Error::UnknownLabel(l.clone()))?;
        subs.push(Subsystem::principal(l.clone(), s.dim));
    }
    Register::new(subs)
}

/// Label of the purifying system of input group `k`.
pub fn environment_label(k: usize) -> String {
    format!("#env{k}")
}

/// Joint input as a state vector over the principals (declaration order)
/// followed by one purifying environment per mixed group.
pub fn prepare_vector(principals: &Register, inputs: &[InputGroup]) -> Result<PureState> {
    check_cover(principals, inputs)?;
    let mut parts = Vec::with_capacity(inputs.len());
    for (k, g) in inputs.iter().enumerate() {
        let reg = group_register(principals, &g.labels)?;
        parts.push(match &g.state {
            InputState::Pure(v) => PureState::new(reg, v.clone())?,
            InputState::Mixed(m) => DensityOperator::new(reg, m.clone())?.purify(&environment_label(k))?,
        });
    }
    let joint = PureState::tensor(&parts)?;
    let mut order = principals.labels();
    order.extend(
        joint
            .register()
            .subsystems()
            .iter()
            .filter(|s| s.role == Role::Environment)
            .map(|s| s.label.as_str()),
    );
    joint.permute(&order)
}

/// Joint input as a density operator over the principals.
pub fn prepare_density(principals: &Register, inputs: &[InputGroup]) -> Result<DensityOperator> {
    check_cover(principals, inputs)?;
    let mut parts = Vec::with_capacity(inputs.len());
    for g in inputs {
        let reg = group_register(principals, &g.labels)?;
        parts.push(match &g.state {
            InputState::Pure(v) => DensityOperator::from_pure(&PureState::new(reg, v.clone())?),
            InputState::Mixed(m) => DensityOperator::new(reg, m.clone())?,
        });
    }
    DensityOperator::tensor(&parts)?.permute(&principals.labels())
}

/// A state the pipeline can evolve: state vectors and density operators.
pub trait Evolvable: Marginals + Clone + Sync + Sized {
    /// Reduced state of a single subsystem.
    fn marginal(&self, label: &str) -> Result<DensityOperator>;

    /// `kets ⊗ self`.
    fn prepend(&self, kets: &[PureState]) -> Result<Self>;

    fn reorder(&self, order: &[&str]) -> Result<Self>;

    fn evolve(&self, u: &CMatrix, labels: &[&str], exec: Execution) -> Result<Self>;
}

impl Evolvable for PureState {
    fn marginal(&self, label: &str) -> Result<DensityOperator> {
        self.partial_trace(&[label])
    }

    fn prepend(&self, kets: &[PureState]) -> Result<Self> {
        let mut parts = kets.to_vec();
        parts.push(self.clone());
        PureState::tensor(&parts)
    }

    fn reorder(&self, order: &[&str]) -> Result<Self> {
        self.permute(order)
    }

    fn evolve(&self, u: &CMatrix, labels: &[&str], exec: Execution) -> Result<Self> {
        self.apply_unitary_with(exec, u, labels)
    }
}

impl Evolvable for DensityOperator {
    fn marginal(&self, label: &str) -> Result<DensityOperator> {
        self.partial_trace(&[label])
    }

    fn prepend(&self, kets: &[PureState]) -> Result<Self> {
        let mut parts: Vec<DensityOperator> = kets.iter().map(DensityOperator::from_pure).collect();
        parts.push(self.clone());
        DensityOperator::tensor(&parts)
    }

    fn reorder(&self, order: &[&str]) -> Result<Self> {
        self.permute(order)
    }

    fn evolve(&self, u: &CMatrix, labels: &[&str], exec: Execution) -> Result<Self> {
        self.apply_unitary_with(exec, u, labels)
    }
}

/// STEP 1: attach each ancilla in the conjugate copy-basis zero ket and
/// apply `sum_i |b_i><b_i|_S ⊗ X^i` on `S'`. The result is in canonical
/// order `[S1', S1, S2', S2, ..., environment...]`.
pub fn step1_couple<S: Evolvable>(input: &S, config: &ProtocolConfig) -> Result<S> {
    let reg = input.register().clone();
    if reg.subsystems().iter().any(|s| s.role == Role::Ancilla) {
        return Err(Error::InvalidRegister("ancillas already attached".to_string()));
    }
    let mut kets = Vec::new();
    for s in reg.principals_iter() {
        let b = config.copy(&s.label)?.conjugate();
        let anc = Register::new(vec![Subsystem::ancilla_of(s)])?;
        kets.push(PureState::new(anc, b.ket(0))?);
    }
    let doubled = reg.with_ancillas()?;
    let mut state = input.prepend(&kets)?.reorder(&doubled.labels())?;
    for s in reg.principals_iter() {
        let b = config.copy(&s.label)?;
        let g = controlled_shift(b, &b.conjugate(), ShiftSign::Plus)?;
        let anc = ancilla_label(&s.label);
        state = state.evolve(&g, &[s.label.as_str(), anc.as_str()], Execution::Sequential)?;
    }
    Ok(state)
}

/// STEP 2: the channel on the principals; ancillas are untouched.
pub fn step2_evolve<S: Evolvable>(state: &S, channel: &ChannelSpec, exec: Execution) -> Result<S> {
    if channel.gates.is_empty() {
        return Ok(state.clone());
    }
    let u = compose(channel, state.register())?;
    let labels = state.register().principal_labels();
    state.evolve(&u, &labels, exec)
}

/// STEP 3: `sum_i |r_i*><r_i*|_{S'} ⊗ X_r^{-i}` on each pair, ancilla as
/// control in the reference basis.
pub fn step3_decouple<S: Evolvable>(state: &S, config: &ProtocolConfig, exec: Execution) -> Result<S> {
    let mut state = state.clone();
    let labels: Vec<String> = state
        .register()
        .principal_labels()
        .iter()
        .map(|l| l.to_string())
        .collect();
    for l in &labels {
        let r = config.reference(l)?;
        let g = controlled_shift(&r.conjugate(), r, ShiftSign::Minus)?;
        let anc = ancilla_label(l);
        state = state.evolve(&g, &[anc.as_str(), l.as_str()], exec)?;
    }
    Ok(state)
}

/// STEP 1 to 3.
pub fn run_steps<S: Evolvable>(
    input: &S,
    channel: &ChannelSpec,
    config: &ProtocolConfig,
    exec: Execution,
) -> Result<S> {
    let coupled = step1_couple(input, config)?;
    let evolved = step2_evolve(&coupled, channel, exec)?;
    step3_decouple(&evolved, config, exec)
}

/// Final state of a run.
#[derive(Debug, Clone, PartialEq)]
pub enum FinalState {
    Pure(PureState),
    Mixed(DensityOperator),
    Diagonal(DiagonalState),
}

impl Marginals for FinalState {
    fn register(&self) -> &Register {
        match self {
            FinalState::Pure(s) => s.register(),
            FinalState::Mixed(s) => s.register(),
            FinalState::Diagonal(s) => s.register(),
        }
    }

    fn marginal_entropy(&self, labels: &[&str]) -> Result<f64> {
        match self {
            FinalState::Pure(s) => s.marginal_entropy(labels),
            FinalState::Mixed(s) => s.marginal_entropy(labels),
            FinalState::Diagonal(s) => s.marginal_entropy(labels),
        }
    }
}

/// Input state kept for the correlation warning.
#[derive(Debug, Clone, PartialEq)]
pub enum InputRecord {
    Pure(PureState),
    Mixed(DensityOperator),
    Diagonal(DiagonalState),
}

impl From<PureState> for InputRecord {
    fn from(s: PureState) -> Self {
        InputRecord::Pure(s)
    }
}

impl From<DensityOperator> for InputRecord {
    fn from(s: DensityOperator) -> Self {
        InputRecord::Mixed(s)
    }
}

impl From<DiagonalState> for InputRecord {
    fn from(s: DiagonalState) -> Self {
        InputRecord::Diagonal(s)
    }
}

impl InputRecord {
    fn mutual_information(&self, a: &[&str], b: &[&str]) -> Result<f64> {
        match self {
            InputRecord::Pure(s) => mutual_information(s, a, b),
            InputRecord::Mixed(s) => mutual_information(s, a, b),
            InputRecord::Diagonal(s) => mutual_information(s, a, b),
        }
    }
}

/// Metadata carried by each result.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Metadata {
    pub mode: Mode,
    /// Per principal: `comp`, `fourier` or `custom`.
    pub copy_bases: BTreeMap<String, String>,
    pub ref_bases: BTreeMap<String, String>,
    pub warnings: Vec<String>,
}

/// One evaluated query.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryResult {
    pub value: f64,
    pub source: Vec<String>,
    pub target: Vec<String>,
    pub conditioned: Vec<String>,
    /// Every marginal entropy used, keyed by labels in register order.
    pub entropies: Vec<(Vec<String>, f64)>,
    pub metadata: Metadata,
}

impl QueryResult {
    pub fn query(&self) -> Query {
        Query::given(&self.source, &self.target, &self.conditioned)
    }
}

/// Final state plus the bases that produced it.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub state: FinalState,
    pub config: ProtocolConfig,
    input: Option<InputRecord>,
    notes: Vec<String>,
}

impl Outcome {
    pub(crate) fn new(
        state: FinalState,
        input: Option<InputRecord>,
        config: ProtocolConfig,
        notes: Vec<String>,
    ) -> Self {
        Outcome {
            state,
            config,
            input,
            notes,
        }
    }

    pub fn owi(&self, source: &[&str], target: &[&str]) -> Result<QueryResult> {
        self.query(&Query::new(source, target), Execution::Sequential)
    }

    pub fn conditional_owi(&self, source: &[&str], target: &[&str], given: &[&str]) -> Result<QueryResult> {
        self.query(&Query::given(source, target, given), Execution::Sequential)
    }

    pub fn query(&self, q: &Query, exec: Execution) -> Result<QueryResult> {
        let src: Vec<&str> = q.source.iter().map(String::as_str).collect();
        let tgt: Vec<&str> = q.target.iter().map(String::as_str).collect();
        let given: Vec<&str> = q.given.iter().map(String::as_str).collect();
        let mut result = evaluate(&self.state, &src, &tgt, &given, exec)?;
        let mut meta = Metadata {
            mode: self.config.mode,
            warnings: self.notes.clone(),
            ..Metadata::default()
        };
        for (l, b) in &self.config.copy_bases {
            meta.copy_bases.insert(l.clone(), b.describe().to_string());
        }
        for (l, b) in &self.config.ref_bases {
            meta.ref_bases.insert(l.clone(), b.describe().to_string());
        }
        if let Some(input) = &self.input {
            let corr = input.mutual_information(&src, &tgt)?;
            if corr > CORRELATION_WARN {
                meta.warnings.push(format!(
                    "inputs of {} and {} are correlated ({corr:.6} bits); the measure ignores initial correlations",
                    q.source.join(","),
                    q.target.join(",")
                ));
            }
        }
        result.metadata = meta;
        Ok(result)
    }

    /// Pairwise conditional OWI over all principals.
    pub fn causal_matrix(&self, exec: Execution) -> Result<CausalMatrix> {
        causal_matrix(&self.state, exec)
    }
}

fn check_principals(register: &Register, labels: &[&str]) -> Result<()> {
    for l in labels {
        match register.get(l) {
            Some(s) if s.role == Role::Principal => {}
            Some(_) => return Err(Error::NotPrincipal(l.to_string())),
            None => return Err(Error::UnknownLabel(l.to_string())),
        }
    }
    Ok(())
}

fn check_disjoint(sets: &[&[&str]]) -> Result<()> {
    for (i, a) in sets.iter().enumerate() {
        for (k, l) in a.iter().enumerate() {
            if a[..k].contains(l) || sets[i + 1..].iter().any(|b| b.contains(l)) {
                return Err(Error::OverlappingSets(l.to_string()));
            }
        }
    }
    Ok(())
}

/// `I(target : source' source | target' given' given)` on a final state,
/// entropies evaluated under `exec`.
pub fn evaluate<M: Marginals + Sync + ?Sized>(
    state: &M,
    source: &[&str],
    target: &[&str],
    given: &[&str],
    exec: Execution,
) -> Result<QueryResult> {
    if source.is_empty() || target.is_empty() {
        return Err(Error::EmptySelection);
    }
    let register = state.register();
    check_principals(register, source)?;
    check_principals(register, target)?;
    check_principals(register, given)?;
    check_disjoint(&[source, target, given])?;
    let primed = |set: &[&str]| -> Vec<String> {
        set.iter().flat_map(|l| [ancilla_label(l), l.to_string()]).collect()
    };
    let gamma_owned = primed(source);
    let mut beta_owned: Vec<String> = target.iter().map(|l| ancilla_label(l)).collect();
    beta_owned.extend(primed(given));
    let gamma: Vec<&str> = gamma_owned.iter().map(String::as_str).collect();
    let beta: Vec<&str> = beta_owned.iter().map(String::as_str).collect();
    let subsets = cmi_subsets(target, &gamma, &beta);
    let table = EntropyTable::compute(state, &subsets, exec)?;
    let value = table.cmi(register, target, &gamma, &beta)?.max(0.0);
    let entropies = table
        .entries(register)
        .into_iter()
        .map(|(k, v)| (k.into_iter().map(str::to_string).collect(), v))
        .collect();
    let own = |v: &[&str]| v.iter().map(|l| l.to_string()).collect();
    Ok(QueryResult {
        value,
        source: own(source),
        target: own(target),
        conditioned: own(given),
        entropies,
        metadata: Metadata::default(),
    })
}

/// `C(A -> B) = I(B : A'A | B')`.
pub fn owi<M: Marginals + Sync + ?Sized>(state: &M, source: &[&str], target: &[&str]) -> Result<QueryResult> {
    evaluate(state, source, target, &[], Execution::Sequential)
}

/// `C(A -> B | E) = I(B : A'A | E'E B')`.
pub fn conditional_owi<M: Marginals + Sync + ?Sized>(
    state: &M,
    source: &[&str],
    target: &[&str],
    given: &[&str],
) -> Result<QueryResult> {
    evaluate(state, source, target, given, Execution::Sequential)
}

/// One term `C(S_k -> target | S_1 .. S_{k-1})` of a chain-rule split.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainTerm {
    pub source: String,
    pub given: Vec<String>,
    pub value: f64,
}

/// Total OWI received by `target` from all other principals and its
/// chain-rule split in declaration order.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainRule {
    pub target: String,
    pub total: f64,
    pub terms: Vec<ChainTerm>,
}

impl ChainRule {
    /// `total - sum(terms)`; zero up to round-off.
    pub fn residual(&self) -> f64 {
        self.total - self.terms.iter().map(|t| t.value).sum::<f64>()
    }
}

/// `entries[a][b] = C(S_a -> S_b | all others)`, `None` on the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalMatrix {
    pub labels: Vec<String>,
    pub entries: Vec<Vec<Option<f64>>>,
    pub chains: Vec<ChainRule>,
}

impl CausalMatrix {
    pub fn get(&self, source: &str, target: &str) -> Option<f64> {
        let a = self.labels.iter().position(|l| l == source)?;
        let b = self.labels.iter().position(|l| l == target)?;
        self.entries[a][b]
    }

    /// Total conditional OWI sent by each principal.
    pub fn row_sums(&self) -> Vec<f64> {
        self.entries
            .iter()
            .map(|row| row.iter().flatten().sum())
            .collect()
    }

    /// Ordered pairs with value above `threshold`.
    pub fn edges(&self, threshold: f64) -> Vec<(String, String, f64)> {
        let mut out = Vec::new();
        for (a, row) in self.entries.iter().enumerate() {
            for (b, v) in row.iter().enumerate() {
                if let Some(v) = v {
                    if *v > threshold {
                        out.push((self.labels[a].clone(), self.labels[b].clone(), *v));
                    }
                }
            }
        }
        out
    }
}

/// Causal matrix and chain-rule splits of a final state; pairs are
/// evaluated concurrently under `exec`.
pub fn causal_matrix<M: Marginals + Sync + ?Sized>(state: &M, exec: Execution) -> Result<CausalMatrix> {
    let labels: Vec<String> = state
        .register()
        .principal_labels()
        .iter()
        .map(|l| l.to_string())
        .collect();
    let n = labels.len();
    if n < 2 {
        return Err(Error::InvalidRegister("causal matrix needs two principals".to_string()));
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
        .collect();
    let values = par::try_map(exec, &pairs, |&(a, b)| {
        let given: Vec<&str> = (0..n)
            .filter(|&k| k != a && k != b)
            .map(|k| labels[k].as_str())
            .collect();
        evaluate(state, &[&labels[a]], &[&labels[b]], &given, Execution::Sequential).map(|r| r.value)
    })?;
    let mut entries = vec![vec![None; n]; n];
    for (&(a, b), v) in pairs.iter().zip(values) {
        entries[a][b] = Some(v);
    }
    let targets: Vec<usize> = (0..n).collect();
    let chains = par::try_map(exec, &targets, |&b| {
        let others: Vec<&str> = (0..n).filter(|&k| k != b).map(|k| labels[k].as_str()).collect();
        let total = evaluate(state, &others, &[&labels[b]], &[], Execution::Sequential)?.value;
        let mut terms = Vec::with_capacity(others.len());
        for (k, src) in others.iter().enumerate() {
            let value = evaluate(state, &[src], &[&labels[b]], &others[..k], Execution::Sequential)?.value;
            terms.push(ChainTerm {
                source: src.to_string(),
                given: others[..k].iter().map(|l| l.to_string()).collect(),
                value,
            });
        }
        Ok::<_, Error>(ChainRule {
            target: labels[b].clone(),
            total,
            terms,
        })
    })?;
    Ok(CausalMatrix {
        labels,
        entries,
        chains,
    })
}
