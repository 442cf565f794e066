//! Frozen test formulas used across the crate and by the CLI harness.
//!
//! * `B` — the running example: 4 variables, 4 clauses, satisfiable.
//! * `U3` — all 8 sign patterns over 3 variables: the smallest canonical
//!   unsatisfiable 3-CNF (every assignment falsifies exactly one clause).

use crate::cnf::{Assignment, Clause, CnfInstance, Literal};

/// DIMACS text of the running example
/// `(x1∨x2∨x3) ∧ (~x1∨x3∨x4) ∧ (~x1∨~x2∨x4) ∧ (x2∨~x3∨~x4)`.
pub const EXAMPLE_B_DIMACS: &str = "p cnf 4 4\n1 2 3 0\n-1 3 4 0\n-1 -2 4 0\n2 -3 -4 0\n";

/// The running example as an instance.
pub fn example_b() -> CnfInstance {
    let lit = |v: i64| {
        if v < 0 {
            Literal::negative(v.unsigned_abs() as u32)
        } else {
            Literal::positive(v as u32)
        }
    };
    let clause = |a: i64, b: i64, c: i64| Clause::new(&[lit(a), lit(b), lit(c)]).unwrap();
    CnfInstance::new(
        4,
        vec![
            clause(1, 2, 3),
            clause(-1, 3, 4),
            clause(-1, -2, 4),
            clause(2, -3, -4),
        ],
    )
    .unwrap()
}

/// A satisfying assignment for [`example_b`]: x1=F, x2=T, x3=T, x4=F.
pub fn example_b_witness() -> Assignment {
    Assignment::new(vec![false, true, true, false])
}

/// All eight sign patterns over x1, x2, x3. Clause `s` (0-based) negates
/// literal `j` iff bit `2 - j` of `s` is set, so clause 0 is (x1∨x2∨x3)
/// and clause 7 is (~x1∨~x2∨~x3). Unsatisfiable: assignment `a` falsifies
/// exactly the clause whose pattern complements `a`.
pub fn unsat_u3() -> CnfInstance {
    let mut clauses = Vec::with_capacity(8);
    for s in 0u32..8 {
        let lits: Vec<Literal> = (0u32..3)
            .map(|j| Literal {
                var: j + 1,
                negated: (s >> (2 - j)) & 1 == 1,
            })
            .collect();
        clauses.push(Clause::new(&lits).unwrap());
    }
    CnfInstance::new(3, clauses).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn b_matches_its_dimacs_text() {
        assert_eq!(example_b().to_dimacs(), EXAMPLE_B_DIMACS);
    }

    #[test]
    fn b_witness_satisfies_b() {
        assert!(example_b().evaluate(&example_b_witness()).unwrap());
    }

    #[test]
    fn u3_shape() {
        let u3 = unsat_u3();
        assert_eq!(u3.num_vars(), 3);
        assert_eq!(u3.num_clauses(), 8);
        // All clauses distinct; first all-positive, last all-negative.
        let firsts = u3.clauses()[0].literals();
        assert!(firsts.iter().all(|l| !l.negated));
        let lasts = u3.clauses()[7].literals();
        assert!(lasts.iter().all(|l| l.negated));
        for a in 0..8u32 {
            let assignment = Assignment::new((0..3).map(|j| (a >> (2 - j)) & 1 == 1).collect());
            let falsified = u3
                .clauses()
                .iter()
                .filter(|c| !c.evaluate(&assignment).unwrap())
                .count();
            assert_eq!(falsified, 1, "each assignment falsifies exactly one clause");
        }
    }
}
