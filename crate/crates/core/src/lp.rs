//! CPLEX LP export of the compact linearized model.
//!
//! Variables: `x<j>` selects subset `j`, `y<i>_<j>` is forced to 1 when both
//! subsets of a conflicting pair are selected (ids 1-based).
//!
//! ```text
//! min  sum c_j x_j + sum d_ij y_ij
//! s.t. sum_{j : k in S_j} x_j >= 1           for each element k
//!      y_ij - x_i - x_j >= -1                for each conflicting pair
//!      x, y binary
//! ```

use std::fmt::Write as _;

use crate::model::Instance;

/// Terms per output line; CPLEX caps line length.
const TERMS_PER_LINE: usize = 8;

pub fn x_name(j: usize) -> String {
    format!("x{}", j + 1)
}

pub fn y_name(i: usize, j: usize) -> String {
    format!("y{}_{}", i + 1, j + 1)
}

struct Row<'a> {
    out: &'a mut String,
    terms: usize,
}

impl<'a> Row<'a> {
    fn start(out: &'a mut String, label: &str) -> Self {
        let _ = write!(out, " {label}:");
        Row { out, terms: 0 }
    }

    fn term(&mut self, coef: i128, var: &str) {
        if self.terms > 0 && self.terms.is_multiple_of(TERMS_PER_LINE) {
            self.out.push_str("\n  ");
        }
        let sign = if coef < 0 {
            "-"
        } else if self.terms > 0 {
            "+"
        } else {
            ""
        };
        let mag = coef.unsigned_abs();
        if self.terms > 0 || coef < 0 {
            let _ = write!(self.out, " {sign}");
        }
        if mag == 1 && self.terms > 0 {
            let _ = write!(self.out, " {var}");
        } else {
            let _ = write!(self.out, " {mag} {var}");
        }
        self.terms += 1;
    }

    fn finish(self, rhs: &str) {
        let _ = writeln!(self.out, "{rhs}");
    }
}

/// Renders the model as CPLEX LP text.
pub fn export_lp(inst: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "\\ set covering with conflict penalties: {}",
        inst.name()
    );
    out.push_str("Minimize\n");
    let mut obj = Row::start(&mut out, "obj");
    for j in 0..inst.num_subsets() {
        obj.term(i128::from(inst.cost(j)), &x_name(j));
    }
    for c in inst.conflicts() {
        obj.term(i128::from(c.penalty), &y_name(c.i, c.j));
    }
    obj.finish("");

    out.push_str("Subject To\n");
    for k in 0..inst.num_elements() {
        let mut row = Row::start(&mut out, &format!("cover{}", k + 1));
        let coverers = inst.coverers(k);
        if coverers.is_empty() && inst.num_subsets() > 0 {
            row.term(0, &x_name(0));
        }
        for &j in coverers {
            row.term(1, &x_name(j));
        }
        row.finish(" >= 1");
    }
    for c in inst.conflicts() {
        let mut row = Row::start(&mut out, &format!("conflict{}_{}", c.i + 1, c.j + 1));
        row.term(1, &y_name(c.i, c.j));
        row.term(-1, &x_name(c.i));
        row.term(-1, &x_name(c.j));
        row.finish(" >= -1");
    }

    out.push_str("Binaries\n");
    let names = (0..inst.num_subsets())
        .map(x_name)
        .chain(inst.conflicts().iter().map(|c| y_name(c.i, c.j)));
    for (k, name) in names.enumerate() {
        out.push_str(if k % 10 == 0 {
            if k > 0 {
                "\n "
            } else {
                " "
            }
        } else {
            " "
        });
        out.push_str(&name);
    }
    out.push_str("\nEnd\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Conflict;

    #[test]
    fn single_set_model() {
        let inst = Instance::new("one", 1, vec![4], vec![vec![0]], vec![]).unwrap();
        let lp = export_lp(&inst);
        assert_eq!(
            lp,
            "\\ set covering with conflict penalties: one\nMinimize\n obj: 4 x1\nSubject To\n cover1: 1 x1 >= 1\nBinaries\n x1\nEnd\n"
        );
    }

    #[test]
    fn conflict_row_and_objective_term() {
        let inst = Instance::new(
            "pair",
            1,
            vec![2, 3],
            vec![vec![0], vec![0]],
            vec![Conflict::new(0, 1, 5)],
        )
        .unwrap();
        let lp = export_lp(&inst);
        assert!(lp.contains(" obj: 2 x1 + 3 x2 + 5 y1_2\n"), "{lp}");
        assert!(
            lp.contains(" conflict1_2: 1 y1_2 - x1 - x2 >= -1\n"),
            "{lp}"
        );
        assert!(lp.contains(" cover1: 1 x1 + x2 >= 1\n"), "{lp}");
        assert!(lp.contains("Binaries\n x1 x2 y1_2\nEnd\n"), "{lp}");
    }

    #[test]
    fn long_rows_wrap() {
        let n = 30;
        let inst = Instance::new("wide", 1, vec![1; n], vec![vec![0]; n], vec![]).unwrap();
        let lp = export_lp(&inst);
        assert!(lp.lines().all(|l| l.len() < 255));
        assert_eq!(lp.matches(" x30").count(), 3);
    }
}
