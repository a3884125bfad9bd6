//! Textual process specifications.
//!
//! A spec is a list of line-oriented statements:
//!
//! ```text
//! # worked example
//! system A dim 2
//! system B dim 2
//! state A pure "+"
//! state B pure "0"
//! refbasis B comp
//! channel { cnot A B }
//! query owi A -> B
//! query owi B -> A
//! mode quantum
//! ```
//!
//! Statements: `system L dim N`; `state L.. pure "KET"`, `state L.. pure
//! [c, ..]`, `state L.. mixed [[c, ..], ..]`, `state L.. maximally_mixed`,
//! `state L.. classical 01=0.5 10=0.5`; `copybasis`/`refbasis L` followed
//! by `comp`, `fourier`, `auto` or `custom [[..]]`; `channel { .. }` with
//! gates separated by newlines or `;`; `query owi L.. -> L.. [given L..]`;
//! `mode quantum|quantum_project|classical`. Ket strings carry one symbol
//! per subsystem (`0`-`9`, `+`, and `-` for qubits). Complex numbers are
//! written `a`, `bi` or `a+bi`.
//!
//! Gates: `cnot C T`, `cshift C T BASIS BASIS +|-`, `swap A B`,
//! `ccnot C1 C2 T`, `mcshift C.. -> T BASIS [k, ..]`, `h L`, `x L`, `z L`,
//! `unitary [[..]] on L..`, where BASIS is `comp`, `fourier` or a matrix.

use std::collections::BTreeMap;
use std::fmt;

use crate::bases::{Basis, BasisSpec};
use crate::gates::{toffoli_table, ChannelSpec, Gate, ShiftSign, StandardGate};
use crate::protocol::{InputGroup, Mode, Process, Query};
use crate::tensor::{DensityOperator, Register};
use crate::{CMatrix, CVector, Error, Result, C64, VALIDITY_TOL};

/// Basis declaration for one system.
#[derive(Debug, Clone, PartialEq)]
pub enum BasisDecl {
    Auto,
    Comp,
    Fourier,
    Custom(CMatrix),
}

/// Input state of a group of systems, as written.
#[derive(Debug, Clone, PartialEq)]
pub enum StateKind {
    /// One symbol per subsystem.
    Ket(String),
    Amplitudes(Vec<C64>),
    Mixed(CMatrix),
    MaximallyMixed,
    /// `(digits, probability)` pairs.
    Classical(Vec<(Vec<usize>, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateDecl {
    pub labels: Vec<String>,
    pub kind: StateKind,
}

/// Parsed experiment description.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProcessSpec {
    pub systems: Vec<(String, usize)>,
    pub states: Vec<StateDecl>,
    pub copy_bases: Vec<(String, BasisDecl)>,
    pub ref_bases: Vec<(String, BasisDecl)>,
    pub channel: ChannelSpec,
    pub queries: Vec<Query>,
    pub mode: Mode,
}

/// What went wrong in a spec.
#[derive(Debug, Clone, PartialEq)]
pub enum SpecErrorKind {
    Syntax(String),
    UndeclaredLabel(String),
    /// A well-formed statement with invalid content (non-unitary matrix,
    /// unnormalized state, dimension mismatch, ...).
    Invalid(Error),
}

/// Diagnostic with a 1-based position.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecError {
    pub line: usize,
    pub col: usize,
    pub kind: SpecErrorKind,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: ", self.line, self.col)?;
        match &self.kind {
            SpecErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            SpecErrorKind::UndeclaredLabel(l) => write!(f, "undeclared system `{l}`"),
            SpecErrorKind::Invalid(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for SpecError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    /// Numeric or complex literal, unparsed.
    Number(String),
    Str(String),
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Equals,
    Arrow,
    Plus,
    Minus,
    /// Newline outside brackets, or `;`.
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(s) => format!("number `{s}`"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Equals => "`=`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::End => "end of line".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> SpecError {
    SpecError {
        line,
        col,
        kind: SpecErrorKind::Syntax(msg.into()),
    }
}

fn tokenize(text: &str) -> std::result::Result<Vec<Token>, SpecError> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    for (ln, line) in text.lines().enumerate() {
        let line_no = ln + 1;
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let ch = chars[i];
            let col = i + 1;
            let push = |out: &mut Vec<Token>, tok| out.push(Token { tok, line: line_no, col });
            let starts_number = |k: usize| {
                chars
                    .get(k)
                    .is_some_and(|c| c.is_ascii_digit() || *c == '.')
            };
            match ch {
                '#' => break,
                c if c.is_whitespace() => i += 1,
                '[' => {
                    depth += 1;
                    push(&mut out, Tok::LBracket);
                    i += 1;
                }
                ']' => {
                    depth = depth.saturating_sub(1);
                    push(&mut out, Tok::RBracket);
                    i += 1;
                }
                '{' => {
                    push(&mut out, Tok::LBrace);
                    i += 1;
                }
                '}' => {
                    push(&mut out, Tok::RBrace);
                    i += 1;
                }
                ',' => {
                    push(&mut out, Tok::Comma);
                    i += 1;
                }
                '=' => {
                    push(&mut out, Tok::Equals);
                    i += 1;
                }
                ';' => {
                    push(&mut out, Tok::End);
                    i += 1;
                }
                '"' => {
                    let start = i + 1;
                    let end = chars[start..]
                        .iter()
                        .position(|&c| c == '"')
                        .ok_or_else(|| syntax(line_no, col, "unterminated string"))?;
                    push(&mut out, Tok::Str(chars[start..start + end].iter().collect()));
                    i = start + end + 1;
                }
                '-' if chars.get(i + 1) == Some(&'>') => {
                    push(&mut out, Tok::Arrow);
                    i += 2;
                }
                '+' | '-' if !starts_number(i + 1) => {
                    push(&mut out, if ch == '+' { Tok::Plus } else { Tok::Minus });
                    i += 1;
                }
                c if c.is_ascii_digit() || c == '.' || c == '+' || c == '-' => {
                    let start = i;
                    i += 1;
                    while i < chars.len() {
                        let c = chars[i];
                        let prev = chars[i - 1];
                        let ok = c.is_ascii_digit()
                            || c == '.'
                            || c == 'e'
                            || c == 'E'
                            || ((c == '+' || c == '-') && (prev == 'e' || prev == 'E' || starts_number(i + 1)))
                            || c == 'i';
                        if !ok {
                            break;
                        }
                        i += 1;
                        if c == 'i' {
                            break;
                        }
                    }
                    push(&mut out, Tok::Number(chars[start..i].iter().collect()));
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let start = i;
                    while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                        i += 1;
                    }
                    push(&mut out, Tok::Ident(chars[start..i].iter().collect()));
                }
                other => return Err(syntax(line_no, col, format!("unexpected character `{other}`"))),
            }
        }
        if depth == 0 {
            out.push(Token {
                tok: Tok::End,
                line: line_no,
                col: chars.len() + 1,
            });
        }
    }
    if depth > 0 {
        let (line, col) = out.last().map(|t| (t.line, t.col)).unwrap_or((1, 1));
        return Err(syntax(line, col, "unclosed `[`"));
    }
    Ok(out)
}

fn parse_real(s: &str) -> Option<f64> {
    if s.is_empty() || s.contains(['i', 'I', 'n', 'N']) {
        return None;
    }
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}

/// `a`, `bi` or `a+bi` (also `a-bi`).
fn parse_complex(s: &str) -> Option<C64> {
    let Some(body) = s.strip_suffix('i') else {
        return parse_real(s).map(|re| C64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => Some(C64::new(parse_real(&body[..k])?, parse_real(&body[k..])?)),
        None => Some(C64::new(0.0, parse_real(body)?)),
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    spec: ProcessSpec,
    covered: BTreeMap<String, usize>,
    eof: (usize, usize),
}

type PResult<T> = std::result::Result<T, SpecError>;

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> (usize, usize) {
        self.peek().map(|t| (t.line, t.col)).unwrap_or(self.eof)
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        let (l, c) = self.here();
        Err(syntax(l, c, msg))
    }

    fn invalid_at(&self, (line, col): (usize, usize), e: Error) -> SpecError {
        SpecError {
            line,
            col,
            kind: SpecErrorKind::Invalid(e),
        }
    }

    fn next(&mut self) -> PResult<Token> {
        match self.toks.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => self.err("unexpected end of input"),
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        let t = self.next()?;
        if t.tok != tok {
            return Err(syntax(
                t.line,
                t.col,
                format!("expected {}, found {}", tok.describe(), t.tok.describe()),
            ));
        }
        Ok(())
    }

    fn at(&self, tok: &Tok) -> bool {
        self.peek().is_some_and(|t| &t.tok == tok)
    }

    fn at_ident(&self, word: &str) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Ident(s), .. }) if s == word)
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        let t = self.next()?;
        match t.tok {
            Tok::Ident(s) => Ok(s),
            other => Err(syntax(t.line, t.col, format!("expected {what}, found {}", other.describe()))),
        }
    }

    fn keyword(&mut self, words: &[&str]) -> PResult<String> {
        let t = self.next()?;
        match &t.tok {
            Tok::Ident(s) if words.contains(&s.as_str()) => Ok(s.clone()),
            other => Err(syntax(
                t.line,
                t.col,
                format!("expected one of {}, found {}", words.join("|"), other.describe()),
            )),
        }
    }

    fn end(&mut self) -> PResult<()> {
        if self.peek().is_none() {
            return Ok(());
        }
        self.expect(Tok::End)
    }

    fn dim_of(&self, label: &str) -> Option<usize> {
        self.spec
            .systems
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, d)| *d)
    }

    /// A declared system label.
    fn label(&mut self) -> PResult<String> {
        let (line, col) = self.here();
        let l = self.ident("system label")?;
        if self.dim_of(&l).is_none() {
            return Err(SpecError {
                line,
                col,
                kind: SpecErrorKind::UndeclaredLabel(l),
            });
        }
        Ok(l)
    }

    fn labels_until(&mut self, stops: &[Tok], stop_words: &[&str]) -> PResult<Vec<String>> {
        let mut out = Vec::new();
        while let Some(t) = self.peek() {
            if stops.contains(&t.tok) {
                break;
            }
            if let Tok::Ident(s) = &t.tok {
                if stop_words.contains(&s.as_str()) {
                    break;
                }
            }
            out.push(self.label()?);
        }
        if out.is_empty() {
            return self.err("expected at least one system label");
        }
        Ok(out)
    }

    fn number(&mut self) -> PResult<(String, (usize, usize))> {
        let t = self.next()?;
        match t.tok {
            Tok::Number(s) => Ok((s, (t.line, t.col))),
            other => Err(syntax(t.line, t.col, format!("expected a number, found {}", other.describe()))),
        }
    }

    fn complex(&mut self) -> PResult<C64> {
        let (s, (l, c)) = self.number()?;
        parse_complex(&s).ok_or_else(|| syntax(l, c, format!("malformed number `{s}`")))
    }

    fn real(&mut self) -> PResult<f64> {
        let (s, (l, c)) = self.number()?;
        parse_real(&s).ok_or_else(|| syntax(l, c, format!("expected a real number, found `{s}`")))
    }

    fn integer(&mut self) -> PResult<i64> {
        let (s, (l, c)) = self.number()?;
        s.parse::<i64>()
            .map_err(|_| syntax(l, c, format!("expected an integer, found `{s}`")))
    }

    fn vector(&mut self) -> PResult<Vec<C64>> {
        self.expect(Tok::LBracket)?;
        let mut v = Vec::new();
        if !self.at(&Tok::RBracket) {
            loop {
                v.push(self.complex()?);
                if self.at(&Tok::Comma) {
                    self.next()?;
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RBracket)?;
        Ok(v)
    }

    fn matrix(&mut self) -> PResult<CMatrix> {
        let start = self.here();
        self.expect(Tok::LBracket)?;
        let mut rows = Vec::new();
        loop {
            rows.push(self.vector()?);
            if self.at(&Tok::Comma) {
                self.next()?;
            } else {
                break;
            }
        }
        self.expect(Tok::RBracket)?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(syntax(start.0, start.1, "matrix must be square"));
        }
        Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    fn system(&mut self) -> PResult<()> {
        let (line, col) = self.here();
        let label = self.ident("system label")?;
        if self.dim_of(&label).is_some() {
            return Err(self.invalid_at((line, col), Error::DuplicateLabel(label)));
        }
        self.keyword(&["dim"])?;
        let at = self.here();
        let d = self.integer()?;
        if d < 2 {
            return Err(self.invalid_at(at, Error::InvalidDimension(d.max(0) as usize)));
        }
        self.spec.systems.push((label, d as usize));
        self.end()
    }

    fn group_dims(&self, labels: &[String]) -> Vec<usize> {
        labels.iter().map(|l| self.dim_of(l).unwrap_or(0)).collect()
    }

    fn state(&mut self, start: (usize, usize)) -> PResult<()> {
        let labels = self.labels_until(&[Tok::End], &["pure", "mixed", "maximally_mixed", "classical"])?;
        for l in &labels {
            if self.covered.insert(l.clone(), start.0).is_some() {
                return Err(self.invalid_at(
                    start,
                    Error::Unsupported(format!("system `{l}` already has an input state")),
                ));
            }
        }
        let dims = self.group_dims(&labels);
        let at = self.here();
        let kind = match self.keyword(&["pure", "mixed", "maximally_mixed", "classical"])?.as_str() {
            "pure" => {
                if self.at(&Tok::LBracket) {
                    let at = self.here();
                    let v = self.vector()?;
                    StateKind::Amplitudes(v)
                        .check(&dims)
                        .map_err(|e| self.invalid_at(at, e))?
                } else {
                    let t = self.next()?;
                    let Tok::Str(s) = t.tok else {
                        return Err(syntax(t.line, t.col, "expected a ket string or amplitude list"));
                    };
                    StateKind::Ket(s)
                        .check(&dims)
                        .map_err(|e| self.invalid_at((t.line, t.col), e))?
                }
            }
            "mixed" => {
                let at = self.here();
                let m = self.matrix()?;
                StateKind::Mixed(m)
                    .check(&dims)
                    .map_err(|e| self.invalid_at(at, e))?
            }
            "maximally_mixed" => StateKind::MaximallyMixed,
            _ => {
                let mut pairs = Vec::new();
                while !self.at(&Tok::End) && self.peek().is_some() {
                    let (digits, pos) = self.number()?;
                    self.expect(Tok::Equals)?;
                    let p = self.real()?;
                    let parsed: Option<Vec<usize>> =
                        digits.chars().map(|c| c.to_digit(10).map(|x| x as usize)).collect();
                    let parsed = parsed.ok_or_else(|| syntax(pos.0, pos.1, format!("malformed digit string `{digits}`")))?;
                    pairs.push((parsed, p));
                }
                StateKind::Classical(pairs)
                    .check(&dims)
                    .map_err(|e| self.invalid_at(at, e))?
            }
        };
        self.spec.states.push(StateDecl { labels, kind });
        self.end()
    }

    fn basis_decl(&mut self) -> PResult<BasisDecl> {
        Ok(match self.keyword(&["comp", "fourier", "auto", "custom"])?.as_str() {
            "comp" => BasisDecl::Comp,
            "fourier" => BasisDecl::Fourier,
            "auto" => BasisDecl::Auto,
            _ => BasisDecl::Custom(self.matrix()?),
        })
    }

    fn basis(&mut self, copy: bool) -> PResult<()> {
        let at = self.here();
        let label = self.label()?;
        let mat_at = self.here();
        let decl = self.basis_decl()?;
        if let BasisDecl::Custom(m) = &decl {
            let d = self.dim_of(&label).unwrap_or(0);
            if m.nrows() != d {
                return Err(self.invalid_at(
                    mat_at,
                    Error::DimensionMismatch {
                        expected: d,
                        found: m.nrows(),
                    },
                ));
            }
            Basis::new(m.clone()).map_err(|e| self.invalid_at(mat_at, e))?;
        }
        let list = if copy {
            &mut self.spec.copy_bases
        } else {
            &mut self.spec.ref_bases
        };
        if list.iter().any(|(l, _)| *l == label) {
            return Err(self.invalid_at(
                at,
                Error::Unsupported(format!("basis for `{label}` declared twice")),
            ));
        }
        list.push((label, decl));
        self.end()
    }

    fn gate_basis(&mut self) -> PResult<BasisSpec> {
        if self.at(&Tok::LBracket) {
            let at = self.here();
            let m = self.matrix()?;
            return Basis::new(m)
                .map(BasisSpec::Custom)
                .map_err(|e| self.invalid_at(at, e));
        }
        Ok(match self.keyword(&["comp", "fourier"])?.as_str() {
            "comp" => BasisSpec::Computational,
            _ => BasisSpec::Fourier,
        })
    }

    fn gate(&mut self) -> PResult<Gate> {
        let words = ["cnot", "cshift", "swap", "ccnot", "mcshift", "h", "x", "z", "unitary"];
        Ok(match self.keyword(&words)?.as_str() {
            "cnot" => {
                let c = self.label()?;
                Gate::cnot(&c, &self.label()?)
            }
            "cshift" => {
                let control = self.label()?;
                let target = self.label()?;
                let control_basis = self.gate_basis()?;
                let target_basis = self.gate_basis()?;
                let t = self.next()?;
                let sign = match t.tok {
                    Tok::Plus => ShiftSign::Plus,
                    Tok::Minus => ShiftSign::Minus,
                    other => return Err(syntax(t.line, t.col, format!("expected `+` or `-`, found {}", other.describe()))),
                };
                Gate::ControlledShift {
                    control,
                    target,
                    control_basis,
                    target_basis,
                    sign,
                }
            }
            "swap" => {
                let a = self.label()?;
                Gate::Swap(a, self.label()?)
            }
            "ccnot" => {
                let a = self.label()?;
                let b = self.label()?;
                Gate::ccnot(&a, &b, &self.label()?)
            }
            "mcshift" => {
                let controls = self.labels_until(&[Tok::Arrow], &[])?;
                self.expect(Tok::Arrow)?;
                let target = self.label()?;
                let target_basis = self.gate_basis()?;
                self.expect(Tok::LBracket)?;
                let mut shifts = Vec::new();
                if !self.at(&Tok::RBracket) {
                    loop {
                        shifts.push(self.integer()?);
                        if self.at(&Tok::Comma) {
                            self.next()?;
                        } else {
                            break;
                        }
                    }
                }
                self.expect(Tok::RBracket)?;
                Gate::MultiControlled {
                    controls,
                    target,
                    target_basis,
                    shifts,
                }
            }
            "unitary" => {
                let matrix = self.matrix()?;
                self.keyword(&["on"])?;
                let labels = self.labels_until(&[Tok::End, Tok::RBrace], &[])?;
                Gate::Custom { matrix, labels }
            }
            w => {
                let gate = match w {
                    "h" => StandardGate::H,
                    "x" => StandardGate::X,
                    _ => StandardGate::Z,
                };
                Gate::local(gate, &self.label()?)
            }
        })
    }

    fn channel(&mut self) -> PResult<()> {
        self.expect(Tok::LBrace)?;
        let register = self.register();
        loop {
            while self.at(&Tok::End) {
                self.next()?;
            }
            if self.at(&Tok::RBrace) {
                self.next()?;
                break;
            }
            if self.peek().is_none() {
                return self.err("unclosed `{`");
            }
            let at = self.here();
            let gate = self.gate()?;
            gate.matrix(&register).map_err(|e| self.invalid_at(at, e))?;
            self.spec.channel.gates.push(gate);
            if !self.at(&Tok::RBrace) {
                self.expect(Tok::End)?;
            }
        }
        self.end()
    }

    fn register(&self) -> Register {
        Register::principals(&self.spec.systems).expect("systems validated on declaration")
    }

    fn query(&mut self) -> PResult<()> {
        let at = self.here();
        self.keyword(&["owi"])?;
        let source = self.labels_until(&[Tok::Arrow], &[])?;
        self.expect(Tok::Arrow)?;
        let target = self.labels_until(&[Tok::End], &["given"])?;
        let given = if self.at_ident("given") {
            self.next()?;
            self.labels_until(&[Tok::End], &[])?
        } else {
            Vec::new()
        };
        let all: Vec<&String> = source.iter().chain(&target).chain(&given).collect();
        for (k, l) in all.iter().enumerate() {
            if all[..k].contains(l) {
                return Err(self.invalid_at(at, Error::OverlappingSets(l.to_string())));
            }
        }
        self.spec.queries.push(Query { source, target, given });
        self.end()
    }

    fn mode(&mut self) -> PResult<()> {
        self.spec.mode = match self.keyword(&["quantum", "quantum_project", "classical"])?.as_str() {
            "quantum" => Mode::Quantum,
            "quantum_project" => Mode::QuantumProject,
            _ => Mode::Classical,
        };
        self.end()
    }

    fn run(mut self) -> PResult<ProcessSpec> {
        while let Some(t) = self.peek().cloned() {
            if t.tok == Tok::End {
                self.next()?;
                continue;
            }
            let word = self.keyword(&["system", "state", "copybasis", "refbasis", "channel", "query", "mode"])?;
            match word.as_str() {
                "system" => self.system()?,
                "state" => self.state((t.line, t.col))?,
                "copybasis" => self.basis(true)?,
                "refbasis" => self.basis(false)?,
                "channel" => self.channel()?,
                "query" => self.query()?,
                _ => self.mode()?,
            }
        }
        for (l, _) in &self.spec.systems {
            if !self.covered.contains_key(l) {
                return Err(self.invalid_at(self.eof, Error::MissingInput(l.clone())));
            }
        }
        if self.spec.queries.is_empty() {
            return Err(syntax(self.eof.0, self.eof.1, "at least one `query` is required"));
        }
        Ok(self.spec)
    }
}

/// Pure vector of a ket string, one symbol per subsystem.
fn ket_vector(s: &str, dims: &[usize]) -> Result<CVector> {
    let symbols: Vec<char> = s.chars().collect();
    if symbols.len() != dims.len() {
        return Err(Error::DimensionMismatch {
            expected: dims.len(),
            found: symbols.len(),
        });
    }
    let mut out = CVector::from_element(1, C64::new(1.0, 0.0));
    for (&c, &d) in symbols.iter().zip(dims) {
        let norm = C64::new(1.0 / (d as f64).sqrt(), 0.0);
        let v = match c {
            '+' => CVector::from_element(d, norm),
            '-' if d == 2 => CVector::from_vec(vec![norm, -norm]),
            c => match c.to_digit(10) {
                Some(k) if (k as usize) < d => {
                    let mut v = CVector::zeros(d);
                    v[k as usize] = C64::new(1.0, 0.0);
                    v
                }
                _ => return Err(Error::Unsupported(format!("ket symbol `{c}` for d = {d}"))),
            },
        };
        out = out.kronecker(&v);
    }
    Ok(out)
}

impl StateKind {
    /// Validate against the group dimensions.
    fn check(self, dims: &[usize]) -> Result<Self> {
        // Built lazily: a large group must not allocate before the capacity
        // check runs.
        if self != StateKind::MaximallyMixed {
            self.input(dims)?;
        }
        Ok(self)
    }

    /// The protocol input over a group with dimensions `dims`.
    fn input(&self, dims: &[usize]) -> Result<crate::protocol::InputState> {
        use crate::protocol::InputState;
        let total: usize = dims.iter().product();
        let reg = Register::principals(
            &dims
                .iter()
                .enumerate()
                .map(|(k, &d)| (format!("s{k}"), d))
                .collect::<Vec<_>>(),
        )?;
        Ok(match self {
            StateKind::Ket(s) => InputState::Pure(ket_vector(s, dims)?),
            StateKind::Amplitudes(v) => {
                if v.len() != total {
                    return Err(Error::DimensionMismatch {
                        expected: total,
                        found: v.len(),
                    });
                }
                let v = CVector::from_vec(v.clone());
                if (v.norm() - 1.0).abs() > VALIDITY_TOL {
                    return Err(Error::NotNormalized(v.norm()));
                }
                InputState::Pure(v)
            }
            StateKind::Mixed(m) => {
                DensityOperator::new(reg, m.clone())?;
                InputState::Mixed(m.clone())
            }
            StateKind::MaximallyMixed => {
                InputState::Mixed(CMatrix::identity(total, total) * C64::new(1.0 / total as f64, 0.0))
            }
            StateKind::Classical(pairs) => {
                let mut probs = BTreeMap::new();
                for (digits, p) in pairs {
                    if probs.insert(digits.clone(), *p).is_some() {
                        return Err(Error::Unsupported(format!("digit string {digits:?} listed twice")));
                    }
                }
                let dist = crate::classical::ClassicalDist::new(reg, probs)?;
                InputState::Mixed(dist.to_density_matrix())
            }
        })
    }
}

fn resolve_basis(decl: &BasisDecl, d: usize) -> Result<Option<Basis>> {
    Ok(match decl {
        BasisDecl::Auto => None,
        BasisDecl::Comp => Some(Basis::computational(d)?),
        BasisDecl::Fourier => Some(Basis::fourier_of_computational(d)?),
        BasisDecl::Custom(m) => Some(Basis::new(m.clone())?),
    })
}

/// Parse a spec; diagnostics carry 1-based line and column.
pub fn parse(text: &str) -> std::result::Result<ProcessSpec, SpecError> {
    let toks = tokenize(text)?;
    let eof = (text.lines().count().max(1), 1);
    Parser {
        toks,
        pos: 0,
        spec: ProcessSpec::default(),
        covered: BTreeMap::new(),
        eof,
    }
    .run()
}

fn real_text(x: f64) -> String {
    format!("{x:.16e}")
}

fn complex_text(z: C64) -> String {
    if z.im == 0.0 {
        real_text(z.re)
    } else {
        format!("{}{:+.16e}i", real_text(z.re), z.im)
    }
}

fn vector_text(v: &[C64]) -> String {
    let items: Vec<String> = v.iter().map(|&z| complex_text(z)).collect();
    format!("[{}]", items.join(", "))
}

fn matrix_text(m: &CMatrix) -> String {
    let rows: Vec<String> = (0..m.nrows())
        .map(|i| vector_text(&m.row(i).iter().copied().collect::<Vec<_>>()))
        .collect();
    format!("[{}]", rows.join(", "))
}

fn gate_basis_text(b: &BasisSpec) -> String {
    match b {
        BasisSpec::Computational => "comp".into(),
        BasisSpec::Fourier => "fourier".into(),
        BasisSpec::Custom(b) => matrix_text(b.columns()),
    }
}

fn gate_text(g: &Gate) -> std::result::Result<String, SpecError> {
    Ok(match g {
        Gate::ControlledShift {
            control,
            target,
            control_basis: BasisSpec::Computational,
            target_basis: BasisSpec::Computational,
            sign: ShiftSign::Plus,
        } => format!("cnot {control} {target}"),
        Gate::ControlledShift {
            control,
            target,
            control_basis,
            target_basis,
            sign,
        } => format!(
            "cshift {control} {target} {} {} {}",
            gate_basis_text(control_basis),
            gate_basis_text(target_basis),
            if *sign == ShiftSign::Plus { "+" } else { "-" }
        ),
        Gate::MultiControlled {
            controls,
            target,
            target_basis: BasisSpec::Computational,
            shifts,
        } if controls.len() == 2 && *shifts == toffoli_table() => {
            format!("ccnot {} {} {target}", controls[0], controls[1])
        }
        Gate::MultiControlled {
            controls,
            target,
            target_basis,
            shifts,
        } => {
            let s: Vec<String> = shifts.iter().map(|k| k.to_string()).collect();
            format!(
                "mcshift {} -> {target} {} [{}]",
                controls.join(" "),
                gate_basis_text(target_basis),
                s.join(", ")
            )
        }
        Gate::Swap(a, b) => format!("swap {a} {b}"),
        Gate::Local { gate, label } if *gate != StandardGate::Swap => format!("{} {label}", gate.name()),
        Gate::Local { .. } => {
            return Err(syntax(0, 0, "swap needs two systems"));
        }
        Gate::Custom { matrix, labels } => format!("unitary {} on {}", matrix_text(matrix), labels.join(" ")),
    })
}

fn basis_decl_text(b: &BasisDecl) -> String {
    match b {
        BasisDecl::Auto => "auto".into(),
        BasisDecl::Comp => "comp".into(),
        BasisDecl::Fourier => "fourier".into(),
        BasisDecl::Custom(m) => format!("custom {}", matrix_text(m)),
    }
}

/// Canonical text; `parse(serialize(s)) == s`. Refuses specs without
/// queries.
pub fn serialize(spec: &ProcessSpec) -> std::result::Result<String, SpecError> {
    if spec.queries.is_empty() {
        return Err(syntax(0, 0, "a spec needs at least one query"));
    }
    let mut out = String::new();
    for (l, d) in &spec.systems {
        out.push_str(&format!("system {l} dim {d}\n"));
    }
    for s in &spec.states {
        let body = match &s.kind {
            StateKind::Ket(k) => format!("pure \"{k}\""),
            StateKind::Amplitudes(v) => format!("pure {}", vector_text(v)),
            StateKind::Mixed(m) => format!("mixed {}", matrix_text(m)),
            StateKind::MaximallyMixed => "maximally_mixed".into(),
            StateKind::Classical(pairs) => {
                let items: Vec<String> = pairs
                    .iter()
                    .map(|(digits, p)| {
                        let ds: String = digits.iter().map(|d| d.to_string()).collect();
                        format!("{ds}={}", real_text(*p))
                    })
                    .collect();
                format!("classical {}", items.join(" "))
            }
        };
        out.push_str(&format!("state {} {body}\n", s.labels.join(" ")));
    }
    for (l, b) in &spec.copy_bases {
        out.push_str(&format!("copybasis {l} {}\n", basis_decl_text(b)));
    }
    for (l, b) in &spec.ref_bases {
        out.push_str(&format!("refbasis {l} {}\n", basis_decl_text(b)));
    }
    out.push_str("channel {\n");
    for g in &spec.channel.gates {
        out.push_str(&format!("  {}\n", gate_text(g)?));
    }
    out.push_str("}\n");
    for q in &spec.queries {
        out.push_str(&format!("query owi {} -> {}", q.source.join(" "), q.target.join(" ")));
        if !q.given.is_empty() {
            out.push_str(&format!(" given {}", q.given.join(" ")));
        }
        out.push('\n');
    }
    out.push_str(&format!("mode {}\n", spec.mode.name()));
    Ok(out)
}

impl ProcessSpec {
    pub fn parse(text: &str) -> std::result::Result<Self, SpecError> {
        parse(text)
    }

    pub fn serialize(&self) -> std::result::Result<String, SpecError> {
        serialize(self)
    }

    pub fn register(&self) -> Result<Register> {
        Register::principals(&self.systems)
    }

    /// Doubled dimension `prod d^2`, computed without building anything.
    pub fn doubled_dim(&self) -> usize {
        self.systems
            .iter()
            .fold(1usize, |acc, (_, d)| acc.saturating_mul(d.saturating_mul(*d)))
    }

    /// The executable process.
    pub fn to_process(&self) -> Result<Process> {
        let principals = self.register()?;
        let mut inputs = Vec::with_capacity(self.states.len());
        for s in &self.states {
            let dims = s
                .labels
                .iter()
                .map(|l| principals.get(l).map(|x| x.dim).ok_or_else(|| Error::UnknownLabel(l.clone())))
                .collect::<Result<Vec<_>>>()?;
            inputs.push(InputGroup {
                labels: s.labels.clone(),
                state: s.kind.input(&dims)?,
            });
        }
        let mut process = Process::new(principals, inputs, self.channel.clone()).with_mode(self.mode);
        for (l, decl) in &self.copy_bases {
            let d = self.dim(l)?;
            if let Some(b) = resolve_basis(decl, d)? {
                process = process.with_copy_basis(l, b);
            }
        }
        for (l, decl) in &self.ref_bases {
            let d = self.dim(l)?;
            if let Some(b) = resolve_basis(decl, d)? {
                process = process.with_ref_basis(l, b);
            }
        }
        process.queries = self.queries.clone();
        Ok(process)
    }

    fn dim(&self, label: &str) -> Result<usize> {
        self.systems
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, d)| *d)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }
}
