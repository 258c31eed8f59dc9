use std::cmp::Reverse;
use std::collections::HashMap;

use super::ast::{CRational, Expr};
use super::poly::{to_poly, Poly};
use super::slp::{Instr, Output, SlpProgram};

/// A value under construction: a folded constant, or a tape slot with a
/// pending sign flip.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Node {
    Const(CRational),
    Slot { idx: usize, neg: bool },
}

impl Node {
    pub fn slot(idx: usize) -> Self {
        Node::Slot { idx, neg: false }
    }

    pub fn zero() -> Self {
        Node::Const(CRational::zero())
    }

    pub fn one() -> Self {
        Node::Const(CRational::one())
    }
}

/// Appends instructions to a tape, folding constants, absorbing signs into
/// `Sub`, and reusing identical instructions.
pub(crate) struct TapeBuilder {
    n: usize,
    instrs: Vec<Instr>,
    consts: Vec<CRational>,
    const_index: HashMap<CRational, usize>,
    seen: HashMap<Instr, usize>,
    pow_cache: HashMap<(usize, u32), usize>,
}

impl TapeBuilder {
    pub fn new(n: usize) -> Self {
        TapeBuilder {
            n,
            instrs: Vec::new(),
            consts: Vec::new(),
            const_index: HashMap::new(),
            seen: HashMap::new(),
            pow_cache: HashMap::new(),
        }
    }

    /// Starts from an existing program so new instructions can read its slots.
    pub fn extend(slp: &SlpProgram) -> Self {
        let mut b = TapeBuilder::new(slp.n_inputs);
        b.consts = slp.consts.clone();
        for (k, c) in b.consts.iter().enumerate() {
            b.const_index.entry(c.clone()).or_insert(k);
        }
        for &ins in &slp.instrs {
            let slot = b.n + b.instrs.len();
            b.instrs.push(ins);
            b.seen.entry(ins).or_insert(slot);
        }
        b
    }

    fn emit(&mut self, ins: Instr) -> usize {
        if let Some(&s) = self.seen.get(&ins) {
            return s;
        }
        let slot = self.n + self.instrs.len();
        self.instrs.push(ins);
        self.seen.insert(ins, slot);
        slot
    }

    fn load(&mut self, c: &CRational) -> usize {
        let next = self.consts.len();
        let k = *self.const_index.entry(c.clone()).or_insert(next);
        if k == next {
            self.consts.push(c.clone());
        }
        self.emit(Instr::Const(k))
    }

    fn signed(&mut self, n: &Node) -> (usize, bool) {
        match n {
            Node::Slot { idx, neg } => (*idx, *neg),
            Node::Const(c) if c.is_negative_form() => (self.load(&c.neg()), true),
            Node::Const(c) => (self.load(c), false),
        }
    }

    pub fn neg(&mut self, a: Node) -> Node {
        match a {
            Node::Const(c) => Node::Const(c.neg()),
            Node::Slot { idx, neg } => Node::Slot { idx, neg: !neg },
        }
    }

    pub fn add(&mut self, a: Node, b: Node) -> Node {
        match (&a, &b) {
            (Node::Const(x), Node::Const(y)) => return Node::Const(x.add(y)),
            (Node::Const(x), _) if x.is_zero() => return b,
            (_, Node::Const(y)) if y.is_zero() => return a,
            _ => {}
        }
        let (ai, an) = self.signed(&a);
        let (bi, bn) = self.signed(&b);
        match (an, bn) {
            (false, false) => Node::slot(self.emit(Instr::Add(ai, bi))),
            (false, true) => Node::slot(self.emit(Instr::Sub(ai, bi))),
            (true, false) => Node::slot(self.emit(Instr::Sub(bi, ai))),
            (true, true) => Node::Slot { idx: self.emit(Instr::Add(ai, bi)), neg: true },
        }
    }

    pub fn sub(&mut self, a: Node, b: Node) -> Node {
        let nb = self.neg(b);
        self.add(a, nb)
    }

    pub fn mul(&mut self, a: Node, b: Node) -> Node {
        match (&a, &b) {
            (Node::Const(x), Node::Const(y)) => return Node::Const(x.mul(y)),
            (Node::Const(x), _) | (_, Node::Const(x)) if x.is_zero() => return Node::zero(),
            (Node::Const(x), _) if x.is_one() => return b,
            (_, Node::Const(y)) if y.is_one() => return a,
            (Node::Const(x), _) if x.neg().is_one() => return self.neg(b),
            (_, Node::Const(y)) if y.neg().is_one() => return self.neg(a),
            _ => {}
        }
        let (ai, an) = self.signed(&a);
        let (bi, bn) = self.signed(&b);
        let idx = if ai == bi { self.emit(Instr::Square(ai)) } else { self.emit(Instr::Mul(ai, bi)) };
        Node::Slot { idx, neg: an != bn }
    }

    /// A zero constant divisor is kept on the tape so that evaluation reports
    /// the division by zero.
    pub fn div(&mut self, a: Node, b: Node) -> Node {
        if let Node::Const(y) = &b {
            if let Some(inv) = y.inv() {
                return self.mul(a, Node::Const(inv));
            }
        }
        if matches!(&a, Node::Const(x) if x.is_zero()) && !matches!(&b, Node::Const(_)) {
            return Node::zero();
        }
        let (ai, an) = self.signed(&a);
        let (bi, bn) = self.signed(&b);
        Node::Slot { idx: self.emit(Instr::Div(ai, bi)), neg: an != bn }
    }

    /// `a^k` for `k >= 1` by repeated squaring.
    pub fn pow(&mut self, a: Node, k: u32) -> Node {
        match a {
            Node::Const(c) => Node::Const(c.pow(k as i32).expect("nonnegative power")),
            Node::Slot { idx, neg } => Node::Slot { idx: self.pow_slot(idx, k), neg: neg && k % 2 == 1 },
        }
    }

    fn pow_slot(&mut self, idx: usize, k: u32) -> usize {
        if k == 1 {
            return idx;
        }
        if let Some(&s) = self.pow_cache.get(&(idx, k)) {
            return s;
        }
        let s = if k.is_multiple_of(2) {
            let h = self.pow_slot(idx, k / 2);
            self.emit(Instr::Square(h))
        } else {
            let h = self.pow_slot(idx, k - 1);
            self.emit(Instr::Mul(h, idx))
        };
        self.pow_cache.insert((idx, k), s);
        s
    }

    /// Multivariate Horner form of `p`. The variable occurring in the most
    /// monomials is factored out first, ties going to the larger degree and
    /// then the lower index: `p = v^k·Q + R` with `k` the smallest positive
    /// degree of `v`.
    pub fn horner(&mut self, p: &Poly) -> Node {
        if let Some(c) = p.as_constant() {
            return Node::Const(c);
        }
        let v = (0..p.n)
            .map(|v| (p.occurrence(v), v))
            .filter(|((count, _), _)| *count > 0)
            .max_by_key(|&((count, deg), v)| (count, deg, Reverse(v)))
            .map(|(_, v)| v)
            .expect("nonconstant polynomial has a variable");
        let k = p.terms.keys().filter(|e| e[v] > 0).map(|e| e[v]).min().unwrap();
        let mut q = Poly::zero(p.n);
        let mut r = Poly::zero(p.n);
        for (e, c) in &p.terms {
            if e[v] >= k {
                let mut e = e.clone();
                e[v] -= k;
                q.terms.insert(e, c.clone());
            } else {
                r.terms.insert(e.clone(), c.clone());
            }
        }
        let qn = self.horner(&q);
        let vk = self.pow(Node::slot(v), k);
        let t = self.mul(qn, vk);
        let rn = self.horner(&r);
        self.add(t, rn)
    }

    /// Compiles an expression. With `horner`, every polynomial subtree is
    /// expanded and emitted in Horner form; otherwise the tree is translated
    /// operation by operation.
    pub fn expr(&mut self, e: &Expr, horner: bool) -> Node {
        if horner {
            if let Some(p) = to_poly(e, self.n) {
                return self.horner(&p);
            }
        }
        match e {
            Expr::Const(c) => Node::Const(c.clone()),
            Expr::Var(k) => Node::slot(*k),
            Expr::Add(a, b) => {
                let (a, b) = (self.expr(a, horner), self.expr(b, horner));
                self.add(a, b)
            }
            Expr::Sub(a, b) => {
                let (a, b) = (self.expr(a, horner), self.expr(b, horner));
                self.sub(a, b)
            }
            Expr::Mul(a, b) => {
                let (a, b) = (self.expr(a, horner), self.expr(b, horner));
                self.mul(a, b)
            }
            Expr::Div(a, b) => {
                let (a, b) = (self.expr(a, horner), self.expr(b, horner));
                self.div(a, b)
            }
            Expr::Neg(a) => {
                let a = self.expr(a, horner);
                self.neg(a)
            }
            Expr::Pow(a, k) => {
                let a = self.expr(a, horner);
                match k.cmp(&0) {
                    std::cmp::Ordering::Equal => Node::one(),
                    std::cmp::Ordering::Greater => self.pow(a, *k as u32),
                    std::cmp::Ordering::Less => {
                        let d = self.pow(a, k.unsigned_abs());
                        self.div(Node::one(), d)
                    }
                }
            }
        }
    }

    fn output(&mut self, n: &Node) -> Output {
        match n {
            Node::Const(c) if c.is_zero() => Output::Zero,
            _ => match self.signed(n) {
                (idx, false) => Output::Slot(idx),
                (idx, true) => Output::Slot(self.emit(Instr::Neg(idx))),
            },
        }
    }

    pub fn finish(mut self, outputs: &[Node]) -> SlpProgram {
        let outs: Vec<Output> = outputs.iter().map(|n| self.output(n)).collect();
        eliminate_dead(self.n, &self.instrs, &self.consts, &outs)
    }
}

/// Drops instructions and constants that no output depends on.
pub(crate) fn eliminate_dead(n: usize, instrs: &[Instr], consts: &[CRational], outputs: &[Output]) -> SlpProgram {
    let mut live = vec![false; n + instrs.len()];
    for o in outputs {
        if let Output::Slot(s) = o {
            live[*s] = true;
        }
    }
    for k in (0..instrs.len()).rev() {
        if live[n + k] {
            let (a, b) = instrs[k].operands();
            for s in a.into_iter().chain(b) {
                live[s] = true;
            }
        }
    }
    let mut remap: Vec<usize> = (0..n).collect();
    remap.resize(n + instrs.len(), usize::MAX);
    let mut const_map: HashMap<usize, usize> = HashMap::new();
    let mut new_consts = Vec::new();
    let mut new_instrs = Vec::new();
    for (k, ins) in instrs.iter().enumerate() {
        if !live[n + k] {
            continue;
        }
        let ins = match *ins {
            Instr::Const(c) => Instr::Const(*const_map.entry(c).or_insert_with(|| {
                new_consts.push(consts[c].clone());
                new_consts.len() - 1
            })),
            other => other.map_operands(|s| remap[s]),
        };
        remap[n + k] = n + new_instrs.len();
        new_instrs.push(ins);
    }
    let outputs = outputs
        .iter()
        .map(|o| match o {
            Output::Slot(s) => Output::Slot(remap[*s]),
            Output::Zero => Output::Zero,
        })
        .collect();
    SlpProgram::new(n, new_instrs, new_consts, outputs).expect("builder emits topologically ordered tapes")
}
