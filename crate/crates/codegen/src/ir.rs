//! Straight-line scalar programs over a fixed set of named arrays.
//!
//! A [`KernelProgram`] is what the unrollers produce and what the emitter
//! renders. Every index in it is a constant, so rendered code performs no
//! index arithmetic at run time. The interpreter in [`Memory`] executes a
//! program with the same operation order as the rendered code, which lets
//! tests compare kernels against the library without compiling anything.

use std::fmt::Write as _;

/// Arrays a kernel may touch. Which names they render to is up to the
/// caller of [`KernelProgram::render`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arr {
    /// Input vector.
    X,
    /// Output vector (also the in-place vector of a triangular solve).
    Y,
    /// Matrix values.
    Vals,
    Lx,
    D,
    Dinv,
    /// Dense accumulator of the factorization.
    Scratch,
}

pub const ARRAYS: [Arr; 7] = [Arr::X, Arr::Y, Arr::Vals, Arr::Lx, Arr::D, Arr::Dinv, Arr::Scratch];

impl Arr {
    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Slot {
    pub arr: Arr,
    pub idx: usize,
}

pub fn slot(arr: Arr, idx: usize) -> Slot {
    Slot { arr, idx }
}

/// Accumulator of a multiply-accumulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Acc {
    /// The literal `0.0`.
    Zero,
    /// The current value of the destination.
    Dst,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Op {
    /// `dst = 0`
    Zero(Slot),
    /// `dst = src`
    Copy { dst: Slot, src: Slot },
    /// `dst = a * b`
    Mul { dst: Slot, a: Slot, b: Slot },
    /// `dst = acc + a * b`, or `acc - a * b` when `neg`.
    Mac { dst: Slot, acc: Acc, neg: bool, a: Slot, b: Slot },
    /// `dst = 1 / src`
    Recip { dst: Slot, src: Slot },
    /// Dynamic regularization of a pivot with expected sign `positive`.
    Regularize { dst: Slot, positive: bool },
    /// Abort the kernel if the value is not finite.
    CheckFinite(Slot),
}

impl Op {
    pub fn dst(&self) -> Option<Slot> {
        match *self {
            Op::Zero(d) => Some(d),
            Op::Copy { dst, .. } | Op::Mul { dst, .. } | Op::Mac { dst, .. } | Op::Recip { dst, .. } => Some(dst),
            Op::Regularize { dst, .. } => Some(dst),
            Op::CheckFinite(_) => None,
        }
    }

    fn reads(&self) -> [Option<Slot>; 3] {
        match *self {
            Op::Zero(_) => [None, None, None],
            Op::Copy { src, .. } | Op::Recip { src, .. } => [Some(src), None, None],
            Op::Mul { a, b, .. } => [Some(a), Some(b), None],
            Op::Mac { dst, acc, a, b, .. } => [Some(a), Some(b), (acc == Acc::Dst).then_some(dst)],
            Op::Regularize { dst, .. } => [Some(dst), None, None],
            Op::CheckFinite(s) => [Some(s), None, None],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct KernelProgram {
    pub ops: Vec<Op>,
    /// Length of each array, indexed by [`Arr::index`].
    pub lens: [usize; 7],
}

impl KernelProgram {
    pub fn new(lens: [usize; 7]) -> Self {
        KernelProgram { ops: Vec::new(), lens }
    }

    pub fn push(&mut self, op: Op) {
        self.ops.push(op);
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Multiplications, counting each `Mul` and `Mac` once.
    pub fn mac_count(&self) -> usize {
        self.ops.iter().filter(|op| matches!(op, Op::Mul { .. } | Op::Mac { .. })).count()
    }

    pub fn recip_count(&self) -> usize {
        self.ops.iter().filter(|op| matches!(op, Op::Recip { .. })).count()
    }

    /// Whether every slot read or written lies inside its array.
    pub fn in_bounds(&self) -> bool {
        self.ops.iter().all(|op| {
            op.dst().into_iter().chain(op.reads().into_iter().flatten()).all(|s| s.idx < self.lens[s.arr.index()])
        })
    }

    /// Renders the program as Rust statements, one per line. `name` maps an
    /// array to the identifier it is bound to; regularization reads `eps`
    /// and increments `nreg`, and a failed finiteness check returns `None`.
    ///
    /// Consecutive accumulations into one destination are folded into a
    /// single left-associated expression, which evaluates in the same order
    /// as the separate statements.
    pub fn render(&self, name: &dyn Fn(Arr) -> &'static str) -> Vec<String> {
        let r = |s: Slot| format!("{}[{}]", name(s.arr), s.idx);
        let mut out = Vec::new();
        let mut i = 0;
        while i < self.ops.len() {
            let op = self.ops[i];
            i += 1;
            let mut line = match op {
                Op::Zero(d) => format!("{} = 0.0", r(d)),
                Op::Copy { dst, src } => format!("{} = {}", r(dst), r(src)),
                Op::Mul { dst, a, b } => format!("{} = {} * {}", r(dst), r(a), r(b)),
                Op::Mac { dst, acc, neg, a, b } => {
                    let acc = match acc {
                        Acc::Zero => "0.0".to_string(),
                        Acc::Dst => r(dst),
                    };
                    format!("{} = {} {} {} * {}", r(dst), acc, if neg { '-' } else { '+' }, r(a), r(b))
                }
                Op::Recip { dst, src } => format!("{} = 1.0 / {}", r(dst), r(src)),
                Op::Regularize { dst, positive } => {
                    let d = r(dst);
                    out.push(if positive {
                        format!("if {d} <= 0.0 {{ nreg += 1; {d} = eps; }} else {{ {d} += eps; }}")
                    } else {
                        format!("if {d} >= 0.0 {{ nreg += 1; {d} = -eps; }} else {{ {d} -= eps; }}")
                    });
                    continue;
                }
                Op::CheckFinite(s) => {
                    out.push(format!("if !{}.is_finite() {{ return None; }}", r(s)));
                    continue;
                }
            };
            let dst = op.dst().unwrap();
            let expr_start = !matches!(op, Op::Copy { .. } | Op::Recip { .. });
            while expr_start && i < self.ops.len() {
                match self.ops[i] {
                    Op::Mac { dst: d2, acc: Acc::Dst, neg, a, b } if d2 == dst && a != dst && b != dst => {
                        let _ = write!(line, " {} {} * {}", if neg { '-' } else { '+' }, r(a), r(b));
                        i += 1;
                    }
                    _ => break,
                }
            }
            line.push(';');
            out.push(line);
        }
        out
    }
}

/// Array storage for interpreting a [`KernelProgram`].
#[derive(Debug, Clone, PartialEq)]
pub struct Memory {
    pub arrays: [Vec<f64>; 7],
}

impl Memory {
    /// Zero-filled arrays of the program's lengths.
    pub fn for_program(prog: &KernelProgram) -> Self {
        Memory { arrays: prog.lens.map(|n| vec![0.0; n]) }
    }

    pub fn get(&self, arr: Arr) -> &[f64] {
        &self.arrays[arr.index()]
    }

    pub fn set(&mut self, arr: Arr, vals: &[f64]) {
        self.arrays[arr.index()].copy_from_slice(vals);
    }

    fn at(&self, s: Slot) -> f64 {
        self.arrays[s.arr.index()][s.idx]
    }

    fn put(&mut self, s: Slot, v: f64) {
        self.arrays[s.arr.index()][s.idx] = v;
    }

    /// Runs `prog`. Returns the number of wrong-sign pivots, or `None` if a
    /// finiteness check failed.
    pub fn run(&mut self, prog: &KernelProgram, eps: f64) -> Option<usize> {
        let mut nreg = 0;
        for op in &prog.ops {
            match *op {
                Op::Zero(d) => self.put(d, 0.0),
                Op::Copy { dst, src } => self.put(dst, self.at(src)),
                Op::Mul { dst, a, b } => self.put(dst, self.at(a) * self.at(b)),
                Op::Mac { dst, acc, neg, a, b } => {
                    let acc = match acc {
                        Acc::Zero => 0.0,
                        Acc::Dst => self.at(dst),
                    };
                    let p = self.at(a) * self.at(b);
                    self.put(dst, if neg { acc - p } else { acc + p });
                }
                Op::Recip { dst, src } => self.put(dst, 1.0 / self.at(src)),
                Op::Regularize { dst, positive } => {
                    let v = self.at(dst);
                    let v = if positive {
                        if v <= 0.0 {
                            nreg += 1;
                            eps
                        } else {
                            v + eps
                        }
                    } else if v >= 0.0 {
                        nreg += 1;
                        -eps
                    } else {
                        v - eps
                    };
                    self.put(dst, v);
                }
                Op::CheckFinite(s) => {
                    if !self.at(s).is_finite() {
                        return None;
                    }
                }
            }
        }
        Some(nreg)
    }
}
