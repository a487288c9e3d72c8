//! In-place amplitude kernels. Each is O(2^n) over the amplitude array.

use num_complex::Complex64;

use super::gate::Mat2;

pub(crate) fn apply_mat2(amps: &mut [Complex64], q: usize, m: &Mat2) {
    let stride = 1usize << q;
    for block in amps.chunks_exact_mut(stride << 1) {
        let (lo, hi) = block.split_at_mut(stride);
        for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x0, x1) = (*a0, *a1);
            *a0 = m[0] * x0 + m[1] * x1;
            *a1 = m[2] * x0 + m[3] * x1;
        }
    }
}

pub(crate) fn apply_diag(amps: &mut [Complex64], q: usize, d0: Complex64, d1: Complex64) {
    let stride = 1usize << q;
    for block in amps.chunks_exact_mut(stride << 1) {
        let (lo, hi) = block.split_at_mut(stride);
        lo.iter_mut().for_each(|a| *a *= d0);
        hi.iter_mut().for_each(|a| *a *= d1);
    }
}

pub(crate) fn apply_cnot(amps: &mut [Complex64], control: usize, target: usize) {
    let (cm, tm) = (1usize << control, 1usize << target);
    // Visit every index with control set and target clear exactly once.
    let (low, high) = if cm < tm { (cm, tm) } else { (tm, cm) };
    let n = amps.len();
    let mut base = 0;
    while base < n {
        // Bits `low` and `high` of `base` are zero here; enumerate the rest.
        for mid in (base..base + high).step_by(low << 1) {
            for i in mid..mid + low {
                let src = i | cm;
                amps.swap(src, src | tm);
            }
        }
        base += high << 1;
    }
}

/// Apply a 4×4 matrix on `(a, b)` with local index `bit_a + 2·bit_b`.
pub(crate) fn apply_mat4(amps: &mut [Complex64], a: usize, b: usize, m: &[Complex64; 16]) {
    let (ma, mb) = (1usize << a, 1usize << b);
    let (low, high) = (ma.min(mb), ma.max(mb));
    let offsets = [0, ma, mb, ma | mb];
    let n = amps.len();
    let mut base = 0;
    while base < n {
        for mid in (base..base + high).step_by(low << 1) {
            for i in mid..mid + low {
                let v = [amps[i], amps[i | offsets[1]], amps[i | offsets[2]], amps[i | offsets[3]]];
                for (r, o) in offsets.iter().enumerate() {
                    let row = &m[4 * r..4 * r + 4];
                    amps[i | o] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
                }
            }
        }
        base += high << 1;
    }
}

pub(crate) fn apply_cz(amps: &mut [Complex64], a: usize, b: usize) {
    let mask = (1usize << a) | (1usize << b);
    for (i, amp) in amps.iter_mut().enumerate() {
        if i & mask == mask {
            *amp = -*amp;
        }
    }
}
