//! Index arithmetic shared by states, density operators and the protocol executor.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

use crate::linalg::{CMat, C64, ZERO};

pub fn strides(d: usize, n: usize) -> Vec<usize> {
    let mut s = vec![1usize; n];
    for q in (0..n.saturating_sub(1)).rev() {
        s[q] = s[q + 1] * d;
    }
    s
}

pub fn check_targets(n: usize, targets: &[usize]) -> Result<()> {
    for (i, &t) in targets.iter().enumerate() {
        if t >= n {
            return Err(Error::range(format!("qudit {t} of {n}")));
        }
        if targets[..i].contains(&t) {
            return Err(Error::range(format!("qudit {t} repeated")));
        }
    }
    Ok(())
}

/// Offsets of the `d^k` sub-basis spanned by `targets` (target 0 most significant)
/// and the base indices of all other qudits.
pub fn layout(d: usize, n: usize, targets: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let st = strides(d, n);
    let offsets = digit_offsets(d, targets.iter().map(|&t| st[t]));
    let rest: Vec<usize> = (0..n).filter(|q| !targets.contains(q)).collect();
    let bases = digit_offsets(d, rest.iter().map(|&q| st[q]));
    (offsets, bases)
}

/// All sums `Σ digit_p · stride_p` enumerated with the first stride most significant.
pub fn digit_offsets(d: usize, strides: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut out = vec![0usize];
    for s in strides {
        let mut next = Vec::with_capacity(out.len() * d);
        for &o in &out {
            for k in 0..d {
                next.push(o + k * s);
            }
        }
        out = next;
    }
    out
}

/// In-place `amps ← (M on targets) amps`. `M` must be square of size `d^k`.
pub fn apply_matrix(amps: &mut [C64], d: usize, n: usize, m: &CMat, targets: &[usize]) -> Result<()> {
    check_targets(n, targets)?;
    let dim = d.pow(targets.len() as u32);
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::dim(format!(
            "gate is {}x{}, targets need {dim}x{dim}",
            m.nrows(),
            m.ncols()
        )));
    }
    let (offsets, bases) = layout(d, n, targets);
    if dim >= 32 {
        // Gather the nonzero blocks as columns and multiply once.
        let live: Vec<usize> =
            bases.iter().copied().filter(|&b| offsets.iter().any(|&o| amps[b + o] != ZERO)).collect();
        if m.iter().all(|z| z.im == 0.0) {
            // Real gate: two real products are much cheaper than one complex one.
            let mr = m.map(|z| z.re);
            let re = &mr * DMatrix::from_fn(dim, live.len(), |k, c| amps[live[c] + offsets[k]].re);
            let im = &mr * DMatrix::from_fn(dim, live.len(), |k, c| amps[live[c] + offsets[k]].im);
            for (c, &b) in live.iter().enumerate() {
                for (k, &o) in offsets.iter().enumerate() {
                    amps[b + o] = C64::new(re[(k, c)], im[(k, c)]);
                }
            }
        } else {
            let out = m * CMat::from_fn(dim, live.len(), |k, c| amps[live[c] + offsets[k]]);
            for (c, &b) in live.iter().enumerate() {
                for (k, &o) in offsets.iter().enumerate() {
                    amps[b + o] = out[(k, c)];
                }
            }
        }
        return Ok(());
    }
    // Sparse rows: Kraus operators such as |ab⟩⟨Φ_ab| have a single nonzero row.
    let rows: Vec<Vec<(usize, C64)>> =
        (0..dim).map(|i| (0..dim).filter(|&j| m[(i, j)] != ZERO).map(|j| (j, m[(i, j)])).collect()).collect();
    let mut buf = vec![ZERO; dim];
    for &b in &bases {
        let mut live = false;
        for (k, &o) in offsets.iter().enumerate() {
            buf[k] = amps[b + o];
            live |= buf[k] != ZERO;
        }
        if !live {
            continue;
        }
        for (row, &o) in rows.iter().zip(&offsets) {
            amps[b + o] = row.iter().map(|&(j, x)| x * buf[j]).sum();
        }
    }
    Ok(())
}

/// Swap two qudits in place.
pub fn swap_qudits(amps: &mut [C64], d: usize, n: usize, a: usize, b: usize) -> Result<()> {
    check_targets(n, &[a, b])?;
    let st = strides(d, n);
    let (_, bases) = layout(d, n, &[a, b]);
    for &base in &bases {
        for i in 0..d {
            for j in (i + 1)..d {
                amps.swap(base + i * st[a] + j * st[b], base + j * st[a] + i * st[b]);
            }
        }
    }
    Ok(())
}

/// Reshape amplitudes into a `d^|keep| × d^(n−|keep|)` matrix, rows ordered by `keep`.
pub fn split_matrix(amps: &[C64], d: usize, n: usize, keep: &[usize]) -> Result<CMat> {
    check_targets(n, keep)?;
    let st = strides(d, n);
    let rest: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let row_off = digit_offsets(d, keep.iter().map(|&q| st[q]));
    let col_off = digit_offsets(d, rest.iter().map(|&q| st[q]));
    Ok(CMat::from_fn(row_off.len(), col_off.len(), |r, c| amps[row_off[r] + col_off[c]]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_most_significant_first() {
        assert_eq!(digit_offsets(2, [4, 1].into_iter()), vec![0, 1, 4, 5]);
        assert_eq!(strides(3, 3), vec![9, 3, 1]);
    }

    #[test]
    fn swap_moves_digits() {
        let mut a = vec![ZERO; 9];
        a[1] = C64::new(1.0, 0.0); // |0,1>
        swap_qudits(&mut a, 3, 2, 0, 1).unwrap();
        assert_eq!(a[3], C64::new(1.0, 0.0)); // |1,0>
    }
}
