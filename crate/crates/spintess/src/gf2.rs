//! Linear algebra over the two-element field, in two sizes: compact `u32`
//! masks for the small parameter systems of relation families, and
//! limb-packed rows of arbitrary width for span membership questions.

/// A system of homogeneous parity constraints on up to 32 boolean variables.
/// Each row is a mask; an assignment satisfies the row when the masked bits
/// have even parity. Bit `i` of every mask refers to variable `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParitySystem {
    vars: usize,
    rows: Vec<u32>,
}

impl ParitySystem {
    pub fn new(vars: usize, rows: Vec<u32>) -> Self {
        assert!(vars <= 32, "mask-based systems hold at most 32 variables");
        let mask = if vars == 32 { u32::MAX } else { (1u32 << vars) - 1 };
        assert!(
            rows.iter().all(|r| r & !mask == 0),
            "constraint rows must only mention declared variables"
        );
        ParitySystem { vars, rows }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn satisfies(&self, assignment: u32) -> bool {
        self.rows.iter().all(|row| (row & assignment).count_ones() % 2 == 0)
    }

    /// Reduced row echelon form together with the pivot column of each row.
    fn rref(&self) -> (Vec<u32>, Vec<usize>) {
        let mut rows: Vec<u32> = self.rows.iter().copied().filter(|r| *r != 0).collect();
        let mut pivots = Vec::new();
        let mut next = 0usize;
        for col in 0..self.vars {
            let Some(found) = (next..rows.len()).find(|i| rows[*i] >> col & 1 == 1) else {
                continue;
            };
            rows.swap(next, found);
            for i in 0..rows.len() {
                if i != next && rows[i] >> col & 1 == 1 {
                    rows[i] ^= rows[next];
                }
            }
            pivots.push(col);
            next += 1;
        }
        rows.truncate(next);
        (rows, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis of the solution space.
    pub fn kernel_basis(&self) -> Vec<u32> {
        let (rows, pivots) = self.rref();
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; self.vars];
            for p in &pivots {
                v[*p] = true;
            }
            v
        };
        let mut basis = Vec::new();
        for free in (0..self.vars).filter(|c| !is_pivot[*c]) {
            let mut vec = 1u32 << free;
            for (row, p) in rows.iter().zip(&pivots) {
                if row >> free & 1 == 1 {
                    vec |= 1 << p;
                }
            }
            basis.push(vec);
        }
        basis
    }

    /// Every solution, in ascending mask order.
    pub fn kernel(&self) -> Vec<u32> {
        let basis = self.kernel_basis();
        let mut all = Vec::with_capacity(1 << basis.len());
        for select in 0u32..1 << basis.len() {
            let mut x = 0u32;
            for (i, b) in basis.iter().enumerate() {
                if select >> i & 1 == 1 {
                    x ^= b;
                }
            }
            all.push(x);
        }
        all.sort_unstable();
        all
    }
}

/// A bit vector packed into 64-bit limbs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitRow {
    len: usize,
    limbs: Vec<u64>,
}

impl BitRow {
    pub fn zeros(len: usize) -> Self {
        BitRow { len, limbs: vec![0; len.div_ceil(64)] }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn set(&mut self, i: usize) {
        assert!(i < self.len);
        self.limbs[i / 64] |= 1u64 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        self.limbs[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn xor_assign(&mut self, other: &BitRow) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.limbs.iter_mut().zip(&other.limbs) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|l| *l == 0)
    }

    pub fn lowest_set_bit(&self) -> Option<usize> {
        for (i, limb) in self.limbs.iter().enumerate() {
            if *limb != 0 {
                return Some(i * 64 + limb.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn ones(&self) -> Vec<usize> {
        (0..self.len).filter(|i| self.get(*i)).collect()
    }
}

/// Decide whether `target` lies in the span of `vectors`; when it does,
/// return the indices of a subset of `vectors` summing to it.
pub fn span_solve(vectors: &[BitRow], target: &BitRow) -> Option<Vec<usize>> {
    let mut pivots: Vec<(usize, BitRow, BitRow)> = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        let mut row = v.clone();
        let mut combo = BitRow::zeros(vectors.len());
        combo.set(i);
        for (p, prow, pcombo) in &pivots {
            if row.get(*p) {
                row.xor_assign(prow);
                combo.xor_assign(pcombo);
            }
        }
        if let Some(p) = row.lowest_set_bit() {
            pivots.push((p, row, combo));
        }
    }
    let mut rest = target.clone();
    let mut combo = BitRow::zeros(vectors.len());
    for (p, prow, pcombo) in &pivots {
        if rest.get(*p) {
            rest.xor_assign(prow);
            combo.xor_assign(pcombo);
        }
    }
    if rest.is_zero() {
        Some(combo.ones())
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_parity_system_kernel() {
        // two constraints pairing variables 0 with 2 and 1 with 3
        let sys = ParitySystem::new(4, vec![0b0101, 0b1010]);
        assert_eq!(sys.rank(), 2);
        assert_eq!(sys.kernel(), vec![0b0000, 0b0101, 0b1010, 0b1111]);
        for x in 0u32..16 {
            assert_eq!(sys.satisfies(x), sys.kernel().contains(&x));
        }
    }

    #[test]
    fn dependent_rows_do_not_inflate_rank() {
        let sys = ParitySystem::new(3, vec![0b011, 0b110, 0b101, 0]);
        assert_eq!(sys.rank(), 2);
        assert_eq!(sys.kernel(), vec![0b000, 0b111]);
    }

    #[test]
    fn empty_system_accepts_everything() {
        let sys = ParitySystem::new(2, vec![]);
        assert_eq!(sys.kernel(), vec![0b00, 0b01, 0b10, 0b11]);
    }

    #[test]
    fn span_solver_finds_combinations() {
        let mut v0 = BitRow::zeros(3);
        v0.set(0);
        v0.set(1);
        let mut v1 = BitRow::zeros(3);
        v1.set(1);
        v1.set(2);
        let mut t = BitRow::zeros(3);
        t.set(0);
        t.set(2);
        let combo = span_solve(&[v0.clone(), v1.clone()], &t).expect("target is the sum");
        assert_eq!(combo, vec![0, 1]);

        let mut single = BitRow::zeros(3);
        single.set(0);
        assert!(span_solve(&[v0, v1], &single).is_none());
    }

    #[test]
    fn span_solver_handles_zero_target() {
        let mut v0 = BitRow::zeros(2);
        v0.set(0);
        let zero = BitRow::zeros(2);
        assert_eq!(span_solve(&[v0], &zero), Some(vec![]));
    }
}
