use super::{FieldSpec, ModelParams, REGISTER_QUBITS, SITES};
use crate::engine::{Pauli, PauliString, WeightedPauliSum};
use crate::error::Result;
use crate::scalar::Scalar;

/// Physical origin of a Hamiltonian term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TermGroup {
    J1,
    J1p,
    J2,
    J2p,
    Zeeman,
    Mca,
}

impl TermGroup {
    pub fn is_exchange(self) -> bool {
        matches!(self, TermGroup::J1 | TermGroup::J1p | TermGroup::J2 | TermGroup::J2p)
    }
}

/// Exchange bonds as (site, site, group), zero-based sites.
pub(crate) const BONDS: [(usize, usize, TermGroup); 6] = [
    (0, 1, TermGroup::J1),
    (2, 3, TermGroup::J1),
    (1, 2, TermGroup::J1p),
    (3, 0, TermGroup::J1p),
    (0, 2, TermGroup::J2),
    (1, 3, TermGroup::J2p),
];

/// Coefficient multiplying each of XX, YY, ZZ on a bond of the given group.
/// Nearest-neighbour sums carry an extra factor 1/2.
pub(crate) fn bond_coefficient<T: Scalar>(p: &ModelParams<T>, group: TermGroup) -> T {
    let s2 = p.s * p.s;
    let half = T::lit(0.5);
    match group {
        TermGroup::J1 => p.j1 * s2 * half,
        TermGroup::J1p => p.j1p * s2 * half,
        TermGroup::J2 => p.j2 * s2,
        TermGroup::J2p => p.j2p * s2,
        TermGroup::Zeeman | TermGroup::Mca => T::zero(),
    }
}

/// Per-axis Zeeman coefficient `−g μ_B s H_k` (meV per unit Bloch component).
pub(crate) fn zeeman_coefficients<T: Scalar>(p: &ModelParams<T>, field: &FieldSpec<T>) -> [T; 3] {
    let h = field.components();
    let scale = p.zeeman_scale();
    [-scale * h[0], -scale * h[1], -scale * h[2]]
}

/// Anisotropy coefficients on X Xₐ, Y Yₐ, Z Zₐ: `(−ka, −kb, +kc)`.
pub(crate) fn mca_coefficients<T: Scalar>(p: &ModelParams<T>) -> [T; 3] {
    [-p.ka, -p.kb, p.kc]
}

const AXES: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

/// Pauli-sum Hamiltonian with each term tagged by its origin.
#[derive(Debug, Clone)]
pub struct ModelHamiltonian<T> {
    pub sum: WeightedPauliSum<T>,
    pub groups: Vec<TermGroup>,
}

impl<T: Scalar> ModelHamiltonian<T> {
    /// The terms whose group satisfies `keep`, as a standalone sum.
    pub fn select(&self, keep: impl Fn(TermGroup) -> bool) -> WeightedPauliSum<T> {
        let terms = self
            .sum
            .iter()
            .zip(&self.groups)
            .filter(|(_, g)| keep(**g))
            .map(|(t, _)| t.clone())
            .collect();
        WeightedPauliSum::from_terms(self.sum.qubits(), terms)
            .expect("subset of a valid sum is valid")
    }
}

/// Builds the 8-qubit Hamiltonian with group labels.
///
/// Zeeman terms are emitted only for field components that are non-zero, so
/// a field along b or c adds 4 terms and a general bc-plane field adds 8.
pub fn build_labeled_hamiltonian<T: Scalar>(
    params: &ModelParams<T>,
    field: &FieldSpec<T>,
) -> Result<ModelHamiltonian<T>> {
    params.validate()?;
    field.validate()?;
    let n = REGISTER_QUBITS;
    let mut sum = WeightedPauliSum::new(n);
    let mut groups = Vec::new();

    for &(i, j, group) in &BONDS {
        let c = bond_coefficient(params, group);
        for axis in AXES {
            sum.push(c, PauliString::from_factors(n, &[(i, axis), (j, axis)])?)?;
            groups.push(group);
        }
    }

    let zeeman = zeeman_coefficients(params, field);
    for (axis, &c) in AXES.iter().zip(&zeeman) {
        if c == T::zero() {
            continue;
        }
        for site in 0..SITES {
            sum.push(c, PauliString::from_factors(n, &[(site, *axis)])?)?;
            groups.push(TermGroup::Zeeman);
        }
    }

    let mca = mca_coefficients(params);
    for site in 0..SITES {
        for (axis, &c) in AXES.iter().zip(&mca) {
            sum.push(
                c,
                PauliString::from_factors(n, &[(site, *axis), (site + SITES, *axis)])?,
            )?;
            groups.push(TermGroup::Mca);
        }
    }

    Ok(ModelHamiltonian { sum, groups })
}

pub fn build_hamiltonian<T: Scalar>(
    params: &ModelParams<T>,
    field: &FieldSpec<T>,
) -> Result<WeightedPauliSum<T>> {
    Ok(build_labeled_hamiltonian(params, field)?.sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::BOHR_MAGNETON_MEV_PER_T;

    fn count(h: &ModelHamiltonian<f64>, g: TermGroup) -> usize {
        h.groups.iter().filter(|x| **x == g).count()
    }

    #[test]
    fn zero_field_has_thirty_terms() {
        let h = build_labeled_hamiltonian(&ModelParams::default(), &FieldSpec::along_b(0.0))
            .unwrap();
        assert_eq!(h.sum.len(), 30);
        assert_eq!(count(&h, TermGroup::Zeeman), 0);
        assert_eq!(count(&h, TermGroup::Mca), 12);
        let j1_coeff = h.sum.terms()[0].0;
        assert!((j1_coeff - (-13.0375)).abs() < 1e-12);
        assert_eq!(h.sum.terms()[0].1.to_string(), "XXIIIIII");
    }

    #[test]
    fn field_along_b_adds_four_y_terms() {
        let h = build_labeled_hamiltonian(&ModelParams::default(), &FieldSpec::along_b(1.0))
            .unwrap();
        assert_eq!(h.sum.len(), 34);
        for ((c, p), g) in h.sum.iter().zip(&h.groups) {
            if *g == TermGroup::Zeeman {
                assert!((c + BOHR_MAGNETON_MEV_PER_T).abs() < 1e-15);
                assert!(p.axes().contains(&Pauli::Y));
            }
        }
    }

    #[test]
    fn field_along_c_via_rotation_has_only_z_zeeman() {
        let f = FieldSpec::in_bc(1.0, std::f64::consts::FRAC_PI_2);
        let h = build_labeled_hamiltonian(&ModelParams::default(), &f).unwrap();
        assert_eq!(h.sum.len(), 34);
        for ((c, p), g) in h.sum.iter().zip(&h.groups) {
            if *g == TermGroup::Zeeman {
                assert!((c + BOHR_MAGNETON_MEV_PER_T).abs() < 1e-15);
                assert!(p.axes()[..4].contains(&Pauli::Z));
                assert!(!p.axes().contains(&Pauli::Y));
            }
        }
    }

    #[test]
    fn general_angle_has_thirty_eight_terms() {
        let f = FieldSpec::in_bc(2.0, 0.3);
        let h = build_hamiltonian(&ModelParams::default(), &f).unwrap();
        assert_eq!(h.len(), 38);
    }

    #[test]
    fn mca_signs_and_ancilla_pairing() {
        let p = ModelParams::<f64>::default();
        let h = build_labeled_hamiltonian(&p, &FieldSpec::zero()).unwrap();
        let mca = h.select(|g| g == TermGroup::Mca);
        let first: Vec<_> = mca.iter().take(3).map(|(c, s)| (*c, s.to_string())).collect();
        assert_eq!(
            first,
            vec![
                (-p.ka, "XIIIXIII".to_string()),
                (-p.kb, "YIIIYIII".to_string()),
                (p.kc, "ZIIIZIII".to_string()),
            ]
        );
    }

    #[test]
    fn bond_layout() {
        let p = ModelParams::<f64>::default();
        let h = build_labeled_hamiltonian(&p, &FieldSpec::zero()).unwrap();
        let j1p: Vec<String> = h
            .select(|g| g == TermGroup::J1p)
            .iter()
            .filter(|(_, s)| s.axes().contains(&Pauli::Z))
            .map(|(_, s)| s.to_string())
            .collect();
        assert_eq!(j1p, vec!["IZZIIIII", "ZIIZIIII"]);
        let j2: Vec<_> = h.select(|g| g == TermGroup::J2).iter().map(|(c, _)| *c).collect();
        assert!(j2.iter().all(|c| (c - 87.18 * 0.25).abs() < 1e-12));
    }
}
