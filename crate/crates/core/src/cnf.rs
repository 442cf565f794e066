//! 3-CNF formulas: literals, clauses, DIMACS parsing, evaluation, and a
//! brute-force satisfiability oracle for desk-scale instances.
//!
//! Variables are 1-based (`x1, x2, …`), matching DIMACS. Every clause holds
//! exactly three pairwise-distinct literals; a clause may contain a variable
//! together with its negation (it is then a tautology), but not the same
//! literal twice.

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest variable count [`brute_force_sat`] will enumerate (2^24 rows).
pub const EXHAUSTIVE_VAR_LIMIT: u32 = 24;

/// A variable or its negation. `var` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub var: u32,
    pub negated: bool,
}

impl Literal {
    pub fn positive(var: u32) -> Self {
        Literal {
            var,
            negated: false,
        }
    }

    pub fn negative(var: u32) -> Self {
        Literal { var, negated: true }
    }

    /// Same variable, opposite sign.
    pub fn complement(self) -> Self {
        Literal {
            var: self.var,
            negated: !self.negated,
        }
    }

    /// Signed DIMACS form: `3` or `-3`.
    pub fn to_dimacs(self) -> i64 {
        let v = i64::from(self.var);
        if self.negated {
            -v
        } else {
            v
        }
    }

    /// Truth value under `a`. Errors if `var` is outside the assignment.
    pub fn holds(self, a: &Assignment) -> Result<bool, CnfError> {
        let value = a.get(self.var).ok_or(CnfError::VarOutOfRange {
            var: self.var,
            num_vars: a.num_vars(),
        })?;
        Ok(value != self.negated)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "~x{}", self.var)
        } else {
            write!(f, "x{}", self.var)
        }
    }
}

/// A disjunction of exactly three pairwise-distinct literals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Clause {
    literals: [Literal; 3],
}

impl Clause {
    /// Validates arity (callers may pass slices of any length) and
    /// distinctness. A complementary pair (`x` and `~x`) is allowed; the
    /// identical literal twice is not.
    pub fn new(literals: &[Literal]) -> Result<Self, CnfError> {
        if literals.len() != 3 {
            return Err(CnfError::ClauseArity {
                found: literals.len(),
            });
        }
        for lit in literals {
            if lit.var == 0 {
                return Err(CnfError::VarOutOfRange {
                    var: 0,
                    num_vars: 0,
                });
            }
        }
        for i in 0..3 {
            for j in (i + 1)..3 {
                if literals[i] == literals[j] {
                    return Err(CnfError::DuplicateLiteral {
                        literal: literals[i],
                    });
                }
            }
        }
        Ok(Clause {
            literals: [literals[0], literals[1], literals[2]],
        })
    }

    pub fn literals(&self) -> &[Literal; 3] {
        &self.literals
    }

    /// True iff at least one literal holds under `a`.
    pub fn evaluate(&self, a: &Assignment) -> Result<bool, CnfError> {
        for lit in &self.literals {
            if lit.holds(a)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// A 3-CNF formula: a conjunction of [`Clause`]s over variables `1..=num_vars`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfInstance {
    num_vars: u32,
    clauses: Vec<Clause>,
}

impl CnfInstance {
    /// Validates that every clause mentions only variables `1..=num_vars`
    /// and that the formula is non-trivial (at least one variable and one
    /// clause).
    pub fn new(num_vars: u32, clauses: Vec<Clause>) -> Result<Self, CnfError> {
        if num_vars == 0 || clauses.is_empty() {
            return Err(CnfError::Empty);
        }
        for clause in &clauses {
            for lit in clause.literals() {
                if lit.var > num_vars {
                    return Err(CnfError::VarOutOfRange {
                        var: lit.var,
                        num_vars,
                    });
                }
            }
        }
        Ok(CnfInstance { num_vars, clauses })
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn num_clauses(&self) -> u32 {
        self.clauses.len() as u32
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// True iff every clause holds under `a`. The assignment must cover
    /// exactly `num_vars` variables.
    pub fn evaluate(&self, a: &Assignment) -> Result<bool, CnfError> {
        if a.num_vars() != self.num_vars {
            return Err(CnfError::AssignmentLength {
                expected: self.num_vars,
                found: a.num_vars(),
            });
        }
        for clause in &self.clauses {
            if !clause.evaluate(a)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Serializes back to DIMACS. `parse_dimacs ∘ to_dimacs` is the identity.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for clause in &self.clauses {
            for lit in clause.literals() {
                out.push_str(&lit.to_dimacs().to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }

    /// FNV-1a hash of the canonical DIMACS text, rendered as 16 hex digits.
    /// Stable across runs; used to name instances in reports.
    pub fn fingerprint(&self) -> String {
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for byte in self.to_dimacs().bytes() {
            hash ^= u64::from(byte);
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{hash:016x}")
    }
}

/// A total truth assignment for variables `1..=num_vars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Assignment { values }
    }

    /// All variables false.
    pub fn all_false(num_vars: u32) -> Self {
        Assignment {
            values: vec![false; num_vars as usize],
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.values.len() as u32
    }

    /// Value of 1-based variable `var`, or `None` if out of range.
    pub fn get(&self, var: u32) -> Option<bool> {
        if var == 0 {
            return None;
        }
        self.values.get(var as usize - 1).copied()
    }

    pub fn set(&mut self, var: u32, value: bool) {
        self.values[var as usize - 1] = value;
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| format!("x{}={}", i + 1, if *v { "T" } else { "F" }))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Outcome of the exhaustive oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    /// The lexicographically first satisfying assignment
    /// (`x1` most significant, false before true).
    Satisfiable(Assignment),
    Unsatisfiable,
}

impl SatResult {
    pub fn is_satisfiable(&self) -> bool {
        matches!(self, SatResult::Satisfiable(_))
    }

    pub fn witness(&self) -> Option<&Assignment> {
        match self {
            SatResult::Satisfiable(a) => Some(a),
            SatResult::Unsatisfiable => None,
        }
    }
}

/// Validation and evaluation errors for CNF data.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CnfError {
    #[error("clause must contain exactly 3 literals, found {found}")]
    ClauseArity { found: usize },
    #[error("literal {literal} appears twice in one clause")]
    DuplicateLiteral { literal: Literal },
    #[error("variable x{var} out of range (formula has {num_vars} variables)")]
    VarOutOfRange { var: u32, num_vars: u32 },
    #[error("formula must have at least one variable and one clause")]
    Empty,
    #[error("assignment covers {found} variables, formula has {expected}")]
    AssignmentLength { expected: u32, found: u32 },
    #[error("{num_vars} variables exceeds the exhaustive-search limit of {limit}")]
    TooLarge { num_vars: u32, limit: u32 },
    #[error("random formulas need at least 3 variables, got {num_vars}")]
    TooFewVars { num_vars: u32 },
}

/// Why a constructive `*_from_assignment` direction refused an assignment.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("assignment does not satisfy the formula")]
    NotSatisfying,
    #[error(transparent)]
    Cnf(#[from] CnfError),
}

/// DIMACS CNF parse errors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimacsError {
    #[error("line {line}: expected header `p cnf <vars> <clauses>`, found `{text}`")]
    MalformedHeader { line: usize, text: String },
    #[error("line {line}: `{token}` is not a literal")]
    BadToken { line: usize, token: String },
    #[error("clause list not terminated by 0")]
    MissingTerminator,
    #[error("header declares {declared} clauses, found {found}")]
    ClauseCountMismatch { declared: usize, found: usize },
    #[error(transparent)]
    Cnf(#[from] CnfError),
}

/// Parses DIMACS CNF text: optional `c` comment lines, one `p cnf V C`
/// header, then `C` zero-terminated clauses of three distinct literals each
/// (clauses may wrap across lines).
pub fn parse_dimacs(text: &str) -> Result<CnfInstance, DimacsError> {
    let mut header: Option<(u32, usize)> = None;
    let mut header_line = 0;
    let mut lines = text.lines().enumerate();
    for (idx, raw) in &mut lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() == 4 && fields[0] == "p" && fields[1] == "cnf" {
            if let (Ok(v), Ok(c)) = (fields[2].parse::<u32>(), fields[3].parse::<usize>()) {
                header = Some((v, c));
                header_line = idx;
                break;
            }
        }
        return Err(DimacsError::MalformedHeader {
            line: idx + 1,
            text: line.to_string(),
        });
    }
    let (num_vars, declared) = header.ok_or(DimacsError::MalformedHeader {
        line: header_line + 1,
        text: String::new(),
    })?;

    let mut clauses = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    for (idx, raw) in lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        for token in line.split_whitespace() {
            let value: i64 = token.parse().map_err(|_| DimacsError::BadToken {
                line: idx + 1,
                token: token.to_string(),
            })?;
            if value == 0 {
                clauses.push(Clause::new(&current)?);
                current.clear();
            } else {
                let var = value.unsigned_abs();
                let var = u32::try_from(var).map_err(|_| DimacsError::BadToken {
                    line: idx + 1,
                    token: token.to_string(),
                })?;
                current.push(Literal {
                    var,
                    negated: value < 0,
                });
            }
        }
    }
    if !current.is_empty() {
        return Err(DimacsError::MissingTerminator);
    }
    if clauses.len() != declared {
        return Err(DimacsError::ClauseCountMismatch {
            declared,
            found: clauses.len(),
        });
    }
    Ok(CnfInstance::new(num_vars, clauses)?)
}

/// Decides satisfiability by enumerating all `2^V` assignments in
/// lexicographic order (`x1` most significant, false before true), so the
/// returned witness is the lexicographically first one. Refuses formulas
/// with more than [`EXHAUSTIVE_VAR_LIMIT`] variables.
pub fn brute_force_sat(cnf: &CnfInstance) -> Result<SatResult, CnfError> {
    let v = cnf.num_vars();
    if v > EXHAUSTIVE_VAR_LIMIT {
        return Err(CnfError::TooLarge {
            num_vars: v,
            limit: EXHAUSTIVE_VAR_LIMIT,
        });
    }
    let mut values = vec![false; v as usize];
    for mask in 0..(1u64 << v) {
        for (i, slot) in values.iter_mut().enumerate() {
            *slot = (mask >> (v as usize - 1 - i)) & 1 == 1;
        }
        let a = Assignment::new(values.clone());
        if cnf.evaluate(&a)? {
            return Ok(SatResult::Satisfiable(a));
        }
    }
    Ok(SatResult::Unsatisfiable)
}

/// Samples a random 3-CNF formula: each clause draws three distinct
/// variables (listed in ascending order) and independent uniform signs.
/// Deterministic for a fixed `(num_vars, num_clauses, seed)` triple.
pub fn random_cnf(num_vars: u32, num_clauses: u32, seed: u64) -> Result<CnfInstance, CnfError> {
    if num_vars < 3 {
        return Err(CnfError::TooFewVars { num_vars });
    }
    if num_clauses == 0 {
        return Err(CnfError::Empty);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut clauses = Vec::with_capacity(num_clauses as usize);
    for _ in 0..num_clauses {
        let mut vars: Vec<u32> = Vec::with_capacity(3);
        while vars.len() < 3 {
            let v = rng.random_range(1..=num_vars);
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        vars.sort_unstable();
        let literals: Vec<Literal> = vars
            .into_iter()
            .map(|var| Literal {
                var,
                negated: rng.random_bool(0.5),
            })
            .collect();
        clauses.push(Clause::new(&literals).expect("sampled literals are distinct"));
    }
    CnfInstance::new(num_vars, clauses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{example_b, example_b_witness, unsat_u3, EXAMPLE_B_DIMACS};

    /// Independent satisfiability check: recursive splitting on the first
    /// unassigned variable, no shared code with `brute_force_sat`.
    fn sat_by_splitting(cnf: &CnfInstance) -> bool {
        fn go(cnf: &CnfInstance, partial: &mut Vec<bool>) -> bool {
            if partial.len() == cnf.num_vars() as usize {
                let a = Assignment::new(partial.clone());
                return cnf.evaluate(&a).unwrap();
            }
            for value in [true, false] {
                partial.push(value);
                if go(cnf, partial) {
                    partial.pop();
                    return true;
                }
                partial.pop();
            }
            false
        }
        go(cnf, &mut Vec::new())
    }

    #[test]
    fn parses_the_running_example() {
        let b = parse_dimacs(EXAMPLE_B_DIMACS).unwrap();
        assert_eq!(b.num_vars(), 4);
        assert_eq!(b.num_clauses(), 4);
        assert_eq!(b, example_b());
        // First clause is (x1 ∨ x2 ∨ x3).
        assert_eq!(
            b.clauses()[0].literals(),
            &[
                Literal::positive(1),
                Literal::positive(2),
                Literal::positive(3)
            ]
        );
        // Third clause is (~x1 ∨ ~x2 ∨ x4).
        assert_eq!(
            b.clauses()[2].literals(),
            &[
                Literal::negative(1),
                Literal::negative(2),
                Literal::positive(4)
            ]
        );
    }

    #[test]
    fn dimacs_round_trip_is_identity() {
        let b = example_b();
        assert_eq!(parse_dimacs(&b.to_dimacs()).unwrap(), b);
        let u3 = unsat_u3();
        assert_eq!(parse_dimacs(&u3.to_dimacs()).unwrap(), u3);
    }

    #[test]
    fn evaluates_clauses_and_formulas() {
        // (x ∨ y ∨ ~z) ∧ (~x ∨ ~y ∨ ~z) ∧ (x ∨ ~y ∨ z) under x=T, y=F, z=T.
        let e = CnfInstance::new(
            3,
            vec![
                Clause::new(&[
                    Literal::positive(1),
                    Literal::positive(2),
                    Literal::negative(3),
                ])
                .unwrap(),
                Clause::new(&[
                    Literal::negative(1),
                    Literal::negative(2),
                    Literal::negative(3),
                ])
                .unwrap(),
                Clause::new(&[
                    Literal::positive(1),
                    Literal::negative(2),
                    Literal::positive(3),
                ])
                .unwrap(),
            ],
        )
        .unwrap();
        let a = Assignment::new(vec![true, false, true]);
        assert!(e.evaluate(&a).unwrap());

        let b = example_b();
        assert!(b.evaluate(&example_b_witness()).unwrap());
        assert!(!b.evaluate(&Assignment::all_false(4)).unwrap());
        // x1=T x2=T kills clause 3 unless x4=T; this one fails clause 3.
        assert!(!b
            .evaluate(&Assignment::new(vec![true, true, true, false]))
            .unwrap());
    }

    #[test]
    fn evaluate_rejects_wrong_length() {
        let b = example_b();
        let err = b.evaluate(&Assignment::all_false(3)).unwrap_err();
        assert_eq!(
            err,
            CnfError::AssignmentLength {
                expected: 4,
                found: 3
            }
        );
    }

    #[test]
    fn brute_force_finds_the_lex_first_witness() {
        let b = example_b();
        let result = brute_force_sat(&b).unwrap();
        let witness = result.witness().expect("B is satisfiable");
        assert!(b.evaluate(witness).unwrap());
        // Enumeration order puts x1 first, so F,F,T,F precedes F,T,T,F.
        assert_eq!(witness.values(), &[false, false, true, false]);
    }

    #[test]
    fn brute_force_proves_u3_unsatisfiable() {
        assert_eq!(
            brute_force_sat(&unsat_u3()).unwrap(),
            SatResult::Unsatisfiable
        );
    }

    #[test]
    fn brute_force_agrees_with_independent_splitting() {
        for seed in 0..40 {
            let cnf = random_cnf(3 + seed % 3, 1 + seed % 7, 1000 + u64::from(seed)).unwrap();
            let expected = sat_by_splitting(&cnf);
            assert_eq!(
                brute_force_sat(&cnf).unwrap().is_satisfiable(),
                expected,
                "disagreement on seed {seed}:\n{}",
                cnf.to_dimacs()
            );
        }
    }

    #[test]
    fn brute_force_refuses_oversized_formulas() {
        let clause = Clause::new(&[
            Literal::positive(1),
            Literal::positive(2),
            Literal::positive(3),
        ])
        .unwrap();
        let wide = CnfInstance::new(25, vec![clause]).unwrap();
        assert_eq!(
            brute_force_sat(&wide).unwrap_err(),
            CnfError::TooLarge {
                num_vars: 25,
                limit: 24
            }
        );
    }

    #[test]
    fn clause_arity_is_enforced() {
        let err = parse_dimacs("p cnf 2 1\n1 2 0\n").unwrap_err();
        assert_eq!(err, DimacsError::Cnf(CnfError::ClauseArity { found: 2 }));
        let err = parse_dimacs("p cnf 4 1\n1 2 3 4 0\n").unwrap_err();
        assert_eq!(err, DimacsError::Cnf(CnfError::ClauseArity { found: 4 }));
    }

    #[test]
    fn duplicate_literal_rejected_complementary_pair_allowed() {
        let err = parse_dimacs("p cnf 3 1\n1 1 2 0\n").unwrap_err();
        assert_eq!(
            err,
            DimacsError::Cnf(CnfError::DuplicateLiteral {
                literal: Literal::positive(1)
            })
        );
        // x1 ∨ ~x1 ∨ x2 is tautological but legal: the literals are distinct.
        let cnf = parse_dimacs("p cnf 2 1\n1 -1 2 0\n").unwrap();
        assert_eq!(cnf.num_clauses(), 1);
        assert!(cnf.evaluate(&Assignment::all_false(2)).unwrap());
    }

    #[test]
    fn out_of_range_variable_rejected() {
        let err = parse_dimacs("p cnf 3 1\n1 2 7 0\n").unwrap_err();
        assert_eq!(
            err,
            DimacsError::Cnf(CnfError::VarOutOfRange {
                var: 7,
                num_vars: 3
            })
        );
    }

    #[test]
    fn malformed_header_and_count_mismatch() {
        assert!(matches!(
            parse_dimacs("p sat 3 1\n1 2 3 0\n").unwrap_err(),
            DimacsError::MalformedHeader { line: 1, .. }
        ));
        assert!(matches!(
            parse_dimacs("").unwrap_err(),
            DimacsError::MalformedHeader { .. }
        ));
        assert_eq!(
            parse_dimacs("p cnf 3 2\n1 2 3 0\n").unwrap_err(),
            DimacsError::ClauseCountMismatch {
                declared: 2,
                found: 1
            }
        );
        assert_eq!(
            parse_dimacs("p cnf 3 1\n1 2 3\n").unwrap_err(),
            DimacsError::MissingTerminator
        );
    }

    #[test]
    fn comments_and_clause_wrapping_are_tolerated() {
        let text = "c a comment\nc another\np cnf 3 2\n1 2\n3 0 -1\n-2 -3 0\n";
        let cnf = parse_dimacs(text).unwrap();
        assert_eq!(cnf.num_clauses(), 2);
        assert_eq!(
            cnf.clauses()[1].literals(),
            &[
                Literal::negative(1),
                Literal::negative(2),
                Literal::negative(3)
            ]
        );
    }

    #[test]
    fn random_cnf_is_deterministic_and_well_formed() {
        let a = random_cnf(5, 9, 42).unwrap();
        let b = random_cnf(5, 9, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_cnf(5, 9, 43).unwrap());
        for clause in a.clauses() {
            let vars: Vec<u32> = clause.literals().iter().map(|l| l.var).collect();
            assert!(
                vars.windows(2).all(|w| w[0] < w[1]),
                "ascending distinct vars"
            );
            assert!(vars.iter().all(|&v| (1..=5).contains(&v)));
        }
        assert_eq!(
            random_cnf(2, 3, 7).unwrap_err(),
            CnfError::TooFewVars { num_vars: 2 }
        );
    }

    #[test]
    fn fingerprint_is_stable_and_content_sensitive() {
        let b = example_b();
        assert_eq!(b.fingerprint(), b.fingerprint());
        assert_eq!(b.fingerprint().len(), 16);
        assert_ne!(b.fingerprint(), unsat_u3().fingerprint());
    }
}
