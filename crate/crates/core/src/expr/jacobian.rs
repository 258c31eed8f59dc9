use super::builder::{Node, TapeBuilder};
use super::slp::{Instr, Output, SlpProgram};

/// Jacobian tape of `f` by forward-mode differentiation, one pass per input
/// direction. Outputs are the `m × n` entries in row-major order.
pub fn differentiate(f: &SlpProgram) -> SlpProgram {
    let n = f.n_inputs;
    let mut b = TapeBuilder::extend(f);
    let mut columns: Vec<Vec<Node>> = Vec::with_capacity(n);
    for dir in 0..n {
        let mut tangent: Vec<Node> = (0..n).map(|j| if j == dir { Node::one() } else { Node::zero() }).collect();
        for (k, ins) in f.instrs.iter().enumerate() {
            let slot = n + k;
            let t = match *ins {
                Instr::Const(_) => Node::zero(),
                Instr::Add(a, c) => b.add(tangent[a].clone(), tangent[c].clone()),
                Instr::Sub(a, c) => b.sub(tangent[a].clone(), tangent[c].clone()),
                Instr::Mul(a, c) => {
                    let l = b.mul(tangent[a].clone(), Node::slot(c));
                    let r = b.mul(Node::slot(a), tangent[c].clone());
                    b.add(l, r)
                }
                Instr::Div(a, c) => {
                    let qd = b.mul(Node::slot(slot), tangent[c].clone());
                    let num = b.sub(tangent[a].clone(), qd);
                    b.div(num, Node::slot(c))
                }
                Instr::Neg(a) => b.neg(tangent[a].clone()),
                Instr::Square(a) => {
                    let t = b.mul(Node::slot(a), tangent[a].clone());
                    b.add(t.clone(), t)
                }
            };
            tangent.push(t);
        }
        columns.push(
            f.outputs
                .iter()
                .map(|o| match o {
                    Output::Slot(s) => tangent[*s].clone(),
                    Output::Zero => Node::zero(),
                })
                .collect(),
        );
    }
    let m = f.outputs.len();
    let entries: Vec<Node> = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| columns[j][i].clone()).collect();
    b.finish(&entries)
}
