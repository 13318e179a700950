use super::{qubit_count, CMatrix, CVector, C64, ZERO};
use crate::error::{Error, Result};

const UNITARY_TOL: f64 = 1e-9;

fn check_targets(total: usize, targets: &[usize]) -> Result<()> {
    for (i, &t) in targets.iter().enumerate() {
        if t >= total {
            return Err(Error::InvalidArgument(format!("qubit {t} out of range for {total} qubits")));
        }
        if targets[..i].contains(&t) {
            return Err(Error::InvalidArgument(format!("qubit {t} listed twice")));
        }
    }
    Ok(())
}

/// Bit masks in the global index for each target, `targets[0]` most significant locally.
fn target_masks(total: usize, targets: &[usize]) -> Vec<usize> {
    targets.iter().map(|&t| 1usize << (total - 1 - t)).collect()
}

/// Applies `u` to `targets` of `state`, leaving the other qubits untouched.
///
/// `u` must be `2^k x 2^k` for `k = targets.len()` and unitary within `1e-9`.
pub fn apply_on_qubits(state: &CVector, u: &CMatrix, targets: &[usize]) -> Result<CVector> {
    let total = qubit_count(state.dim())
        .ok_or_else(|| Error::InvalidArgument(format!("state dimension {} is not a power of two", state.dim())))?;
    check_targets(total, targets)?;
    let local = 1usize << targets.len();
    if u.rows() != local || u.cols() != local {
        return Err(Error::InvalidArgument(format!(
            "operator is {}x{} but {} targets need {local}x{local}",
            u.rows(),
            u.cols(),
            targets.len()
        )));
    }
    let defect = u.unitarity_defect();
    if defect > UNITARY_TOL {
        return Err(Error::ContractViolation(format!("operator is not unitary (defect {defect:.3e})")));
    }
    let mut out = state.clone();
    apply_unitary_in_place(out.as_mut_slice(), total, u, targets);
    Ok(out)
}

/// Unchecked in-place form of [`apply_on_qubits`]; callers validate `u` and `targets`.
pub fn apply_unitary_in_place(amps: &mut [C64], total: usize, u: &CMatrix, targets: &[usize]) {
    let k = targets.len();
    if k == 0 {
        let phase = u[(0, 0)];
        amps.iter_mut().for_each(|a| *a *= phase);
        return;
    }
    let masks = target_masks(total, targets);
    let all: usize = masks.iter().sum();
    let local = 1usize << k;
    // offsets[l] = global bits set by local index l
    let offsets: Vec<usize> =
        (0..local).map(|l| (0..k).filter(|&b| l >> (k - 1 - b) & 1 == 1).map(|b| masks[b]).sum()).collect();
    let mut buf = vec![ZERO; local];
    for base in 0..amps.len() {
        if base & all != 0 {
            continue;
        }
        for (l, &off) in offsets.iter().enumerate() {
            buf[l] = amps[base | off];
        }
        for (r, &off) in offsets.iter().enumerate() {
            let row = u.row(r);
            amps[base | off] = row.iter().zip(&buf).map(|(a, b)| a * b).sum();
        }
    }
}

/// Applies the basis permutation `|l⟩ ↦ |perm(l)⟩` on the local register formed by `targets`.
///
/// `perm` must be a bijection on `0..2^targets.len()`.
pub fn apply_permutation_in_place(amps: &mut [C64], total: usize, targets: &[usize], perm: &dyn Fn(usize) -> usize) {
    let k = targets.len();
    let masks = target_masks(total, targets);
    let all: usize = masks.iter().sum();
    let local = 1usize << k;
    let offsets: Vec<usize> =
        (0..local).map(|l| (0..k).filter(|&b| l >> (k - 1 - b) & 1 == 1).map(|b| masks[b]).sum()).collect();
    let images: Vec<usize> = (0..local).map(perm).collect();
    let mut buf = vec![ZERO; local];
    for base in 0..amps.len() {
        if base & all != 0 {
            continue;
        }
        for (l, &off) in offsets.iter().enumerate() {
            buf[l] = amps[base | off];
        }
        for (l, &img) in images.iter().enumerate() {
            amps[base | offsets[img]] = buf[l];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pauli_x() -> CMatrix {
        CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    fn hadamard() -> CMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        CMatrix::from_real(2, 2, &[s, s, s, -s]).unwrap()
    }

    fn cnot() -> CMatrix {
        CMatrix::from_real(4, 4, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0])
            .unwrap()
    }

    #[test]
    fn x_on_qubit_zero_is_most_significant() {
        let out = apply_on_qubits(&CVector::basis(4, 0), &pauli_x(), &[0]).unwrap();
        assert_eq!(out, CVector::basis(4, 0b10));
    }

    #[test]
    fn hadamard_on_single_qubit() {
        let out = apply_on_qubits(&CVector::basis(2, 0), &hadamard(), &[0]).unwrap();
        assert_abs_diff_eq!(out[0].re, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(out[1].re, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn cnot_prepares_bell_state() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let input = CVector::from_real(&[s, 0.0, s, 0.0]);
        let out = apply_on_qubits(&input, &cnot(), &[0, 1]).unwrap();
        let expected = CVector::from_real(&[s, 0.0, 0.0, s]);
        assert!(out.distance(&expected) < 1e-15);
    }

    #[test]
    fn reversed_targets_swap_roles() {
        // control on qubit 1, target qubit 0: |01⟩ -> |11⟩
        let out = apply_on_qubits(&CVector::basis(4, 0b01), &cnot(), &[1, 0]).unwrap();
        assert_eq!(out, CVector::basis(4, 0b11));
    }

    #[test]
    fn rejects_non_unitary_and_bad_targets() {
        let state = CVector::basis(4, 0);
        let bad = CMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(apply_on_qubits(&state, &bad, &[0]), Err(Error::ContractViolation(_))));
        assert!(matches!(apply_on_qubits(&state, &pauli_x(), &[2]), Err(Error::InvalidArgument(_))));
        assert!(matches!(apply_on_qubits(&state, &cnot(), &[1, 1]), Err(Error::InvalidArgument(_))));
        assert!(matches!(apply_on_qubits(&state, &cnot(), &[0]), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn permutation_matches_dense_cnot() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = CVector::from_real(&[0.0, s, s, 0.0]).into_vec();
        apply_permutation_in_place(&mut amps, 2, &[0, 1], &|l| if l >= 2 { l ^ 1 } else { l });
        let dense = apply_on_qubits(&CVector::from_real(&[0.0, s, s, 0.0]), &cnot(), &[0, 1]).unwrap();
        assert!(CVector::from(amps).distance(&dense) < 1e-15);
    }
}
