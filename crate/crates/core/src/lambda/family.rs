//! The depth-exploding family `A_i`/`B_i` and the
//! size-exploding family `A'_n`/`B'_n`.

use super::{substitute, BetaTrace, Name, Strategy, Term};
use crate::position::Position;

/// Church numeral two, `\x.\y.x (x y)`.
pub fn church_two() -> Term {
    let x = || Term::var("x");
    Term::abs_many(["x", "y"], Term::app(x(), Term::app(x(), Term::var("y"))))
}

#[derive(Debug, Clone)]
pub struct DepthFamily {
    pub a: Term,
    pub b: Term,
    /// `A_i ↠β B_i` in exactly `4i` steps, inside-out.
    pub inside_out: BetaTrace,
}

/// `A_0 = x x`, `A_{i+1} = two (\x.A_i) x`, `B_0 = A_0`,
/// `B_{i+1} = B_i[x := B_i]`, plus the scripted trace from `A_i` to `B_i`.
pub fn family_depth_explosion(i: u32) -> DepthFamily {
    let x = Name::new("x");
    let a0 = Term::app(Term::var("x"), Term::var("x"));
    let mut fam = DepthFamily {
        a: a0.clone(),
        b: a0.clone(),
        inside_out: BetaTrace::new(a0, Strategy::Scripted),
    };
    for _ in 0..i {
        let embed = |t: &Term| {
            Term::app(
                Term::app(church_two(), Term::abs(x.clone(), t.clone())),
                Term::var(x.clone()),
            )
        };
        // A_{i+1} = two (\x.A_i) x: the embedded A_i sits at 0.1.0
        let prefix = [0, 1, 0];
        let mut trace = BetaTrace {
            terms: fam.inside_out.terms.iter().map(embed).collect(),
            positions: fam
                .inside_out
                .positions
                .iter()
                .map(|p| p.under(&prefix))
                .collect(),
            strategy: Strategy::Scripted,
        };
        // two (\x.B) x → (\y.(\x.B)((\x.B) y)) x → (\x.B)((\x.B) x)
        //   → (\x.B) B → B[x := B]
        for p in [vec![0], vec![], vec![1], vec![]] {
            trace
                .step(Position(p))
                .expect("scripted positions address redexes");
        }
        fam.a = trace.start().clone();
        fam.b = substitute(&fam.b, &x, &fam.b);
        fam.inside_out = trace;
    }
    fam
}

/// `A'_0 = (y x) x`, `A'_{n+1} = (\x.A'_n) A'_0`, `B'_0 = A'_0`,
/// `B'_{n+1} = B'_n[x := B'_0]`. Returns `(A'_n, B'_n)`.
pub fn family_size_explosion(n: u32) -> (Term, Term) {
    let x = Name::new("x");
    let a0 = Term::app(Term::app(Term::var("y"), Term::var("x")), Term::var("x"));
    let (mut a, mut b) = (a0.clone(), a0.clone());
    for _ in 0..n {
        a = Term::app(Term::abs(x.clone(), a), a0.clone());
        b = substitute(&b, &x, &a0);
    }
    (a, b)
}

/// Closed wrapper `\y.\x.A'_n` of the size-exploding family.
pub fn family_size_closed(n: u32) -> Term {
    Term::abs_many(["y", "x"], family_size_explosion(n).0)
}
