//! Collision-kernel matrix: a relative-speed power times the projector that
//! annihilates the relative velocity.
//!
//! For a species pair with target mass `m` and strength `B`, the kernel at
//! relative velocity `z` is `(B / m) |z|^gamma (|z|^2 I - z (x) z)`. It is
//! symmetric, positive semidefinite, and satisfies `A z = 0`.

use crate::model::{KernelSpec, SpeciesSpec};
use crate::vec3::Vec3;

/// Relative speeds below this are treated as exactly zero: the kernel matrix
/// is defined as zero there for every exponent (the analytic product
/// `|z|^gamma (|z|^2 I - z (x) z)` vanishes with `z` for gamma > -2, and the
/// score difference it multiplies vanishes in the same limit). Cutting at
/// 1e-12 also keeps Coulomb runs finite when particles coincide in floating
/// point.
pub const COINCIDENT_SPEED: f64 = 1e-12;

const COINCIDENT_SPEED_SQ: f64 = COINCIDENT_SPEED * COINCIDENT_SPEED;

/// Dense d x d kernel matrix, stored padded; rows and columns past `dim` are zero.
pub type KernelMatrix = [[f64; 3]; 3];

/// `|z|^gamma` given `r2 = |z|^2`, with the Maxwell and Coulomb exponents on
/// fast paths (the pair loop evaluates this O(N^2) times per step).
#[inline]
pub fn speed_power(r2: f64, gamma: f64) -> f64 {
    if gamma == 0.0 {
        1.0
    } else if gamma == -3.0 {
        1.0 / (r2 * r2.sqrt())
    } else {
        r2.powf(0.5 * gamma)
    }
}

/// True when the pair must be skipped (coincident in floating point).
#[inline]
pub fn is_coincident(r2: f64) -> bool {
    r2 <= COINCIDENT_SPEED_SQ
}

/// Apply the kernel to a vector without materializing the matrix:
/// `coeff |z|^gamma (|z|^2 b - (z . b) z)` where `coeff = B / m` and
/// `pow = |z|^gamma` is supplied by the caller. Returns zero for coincident z.
#[inline]
pub fn apply_kernel(z: Vec3, r2: f64, pow: f64, coeff: f64, b: Vec3) -> Vec3 {
    let zb = z.dot(b);
    (coeff * pow) * (r2 * b - zb * z)
}

/// Kernel matrix for relative velocity `z`, exponent `gamma`, strength
/// `strength`, and target-species mass `mass`. Zero matrix for z = 0.
pub fn eval_kernel(z: Vec3, gamma: f64, strength: f64, mass: f64, dim: usize) -> KernelMatrix {
    let mut a = [[0.0; 3]; 3];
    let r2 = z.norm_sq();
    if is_coincident(r2) {
        return a;
    }
    let c = strength / mass * speed_power(r2, gamma);
    for k in 0..dim {
        for l in 0..dim {
            let diag = if k == l { r2 } else { 0.0 };
            a[k][l] = c * (diag - z[k] * z[l]);
        }
    }
    a
}

/// Kernel matrix for an ordered species pair (`target`, `source`).
///
/// Computed once in a canonical orientation and rescaled by the mass ratio for
/// the other orientation, so the reciprocity identity between the two ordered
/// pairs holds bitwise whenever the strength matrix is symmetric.
pub fn eval_kernel_pair(
    z: Vec3,
    kernel: &KernelSpec,
    species: &[SpeciesSpec],
    target: usize,
    source: usize,
    dim: usize,
) -> KernelMatrix {
    let lo = target.min(source);
    let hi = target.max(source);
    let mut a = eval_kernel(
        z,
        kernel.gamma,
        kernel.strength[lo][hi],
        species[lo].mass,
        dim,
    );
    if target != lo {
        let ratio = species[lo].mass / species[hi].mass;
        for row in a.iter_mut() {
            for entry in row.iter_mut() {
                *entry *= ratio;
            }
        }
    }
    a
}

/// Matrix-vector product for the padded kernel matrix.
pub fn matrix_apply(a: &KernelMatrix, v: Vec3) -> Vec3 {
    Vec3::new(
        a[0][0] * v.x + a[0][1] * v.y + a[0][2] * v.z,
        a[1][0] * v.x + a[1][1] * v.y + a[1][2] * v.z,
        a[2][0] * v.x + a[2][1] * v.y + a[2][2] * v.z,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{KernelSpec, SpeciesSpec};
    use proptest::prelude::*;

    fn frobenius(a: &KernelMatrix) -> f64 {
        a.iter()
            .flat_map(|r| r.iter())
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn unit_x_maxwell_case_by_hand() {
        // |z|^2 I - z (x) z for z = (1, 0) is [[0, 0], [0, 1]].
        let a = eval_kernel(Vec3::new(1.0, 0.0, 0.0), 0.0, 1.0, 1.0, 2);
        assert_eq!(a[0][0], 0.0);
        assert_eq!(a[0][1], 0.0);
        assert_eq!(a[1][0], 0.0);
        assert_eq!(a[1][1], 1.0);
        assert_eq!(a[2][2], 0.0);
    }

    #[test]
    fn coulomb_case_by_hand() {
        // z = (2, 0), gamma = -3: |z|^-3 = 1/8 times [[0, 0], [0, 4]].
        let a = eval_kernel(Vec3::new(2.0, 0.0, 0.0), -3.0, 1.0, 1.0, 2);
        assert_eq!(a[0][0], 0.0);
        assert_eq!(a[1][1], 0.5);
    }

    #[test]
    fn zero_relative_velocity_gives_zero_matrix() {
        for gamma in [-3.0, -2.0, 0.0, 1.0] {
            let a = eval_kernel(Vec3::ZERO, gamma, 1.0, 1.0, 2);
            assert_eq!(frobenius(&a), 0.0);
            // Just below the coincidence cutoff as well.
            let a = eval_kernel(Vec3::new(1e-13, 0.0, 0.0), gamma, 1.0, 1.0, 2);
            assert_eq!(frobenius(&a), 0.0);
            assert!(a.iter().flatten().all(|x| x.is_finite()));
        }
    }

    fn pair_species() -> (KernelSpec, Vec<SpeciesSpec>) {
        let kernel = KernelSpec {
            gamma: -3.0,
            strength: vec![vec![0.125, 0.0625], vec![0.0625, 0.03125]],
        };
        let spec = |mass: f64| SpeciesSpec {
            mass,
            half_width: 1.0,
            center: Vec3::ZERO,
            grid_n: 2,
            epsilon: 0.1,
            label: String::new(),
        };
        (kernel, vec![spec(2.0), spec(1.0)])
    }

    #[test]
    fn reciprocity_is_bitwise() {
        // Kernel for target j equals (m_i / m_j) times the kernel for target i,
        // exactly, for every tested z.
        let (kernel, species) = pair_species();
        let ratio = species[0].mass / species[1].mass;
        for z in [
            Vec3::new(0.3, -1.7, 0.0),
            Vec3::new(1.0, 2.0, 0.0),
            Vec3::new(-0.01, 5.0, 0.0),
        ] {
            let a_target0 = eval_kernel_pair(z, &kernel, &species, 0, 1, 2);
            let a_target1 = eval_kernel_pair(z, &kernel, &species, 1, 0, 2);
            for k in 0..2 {
                for l in 0..2 {
                    assert_eq!(a_target1[k][l], ratio * a_target0[k][l]);
                }
            }
        }
    }

    #[test]
    fn same_species_kernel_is_even_in_z() {
        let (kernel, species) = pair_species();
        let z = Vec3::new(0.4, -0.9, 0.0);
        let plus = eval_kernel_pair(z, &kernel, &species, 0, 0, 2);
        let minus = eval_kernel_pair(-z, &kernel, &species, 0, 0, 2);
        assert_eq!(plus, minus);
    }

    #[test]
    fn psd_null_space_and_scaling_random_trials() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(0x6b65726e);
        for trial in 0..10_000 {
            let dim = if trial % 3 == 0 { 3 } else { 2 };
            let comp = |r: &mut rand::rngs::StdRng| r.gen_range(-3.0..3.0);
            let z = if dim == 2 {
                Vec3::new(comp(&mut rng), comp(&mut rng), 0.0)
            } else {
                Vec3::new(comp(&mut rng), comp(&mut rng), comp(&mut rng))
            };
            let x = if dim == 2 {
                Vec3::new(comp(&mut rng), comp(&mut rng), 0.0)
            } else {
                Vec3::new(comp(&mut rng), comp(&mut rng), comp(&mut rng))
            };
            let gamma = rng.gen_range(-3.0..=1.0);
            let strength = rng.gen_range(0.01..2.0);
            let mass = rng.gen_range(0.1..10.0);
            let a = eval_kernel(z, gamma, strength, mass, dim);
            let norm = frobenius(&a);

            // Positive semidefinite within rounding.
            let quad = x.dot(matrix_apply(&a, x));
            assert!(
                quad >= -1e-14 * x.norm_sq() * norm,
                "x^T A x = {quad} for z = {z:?}, gamma = {gamma}"
            );

            // A z = 0 within rounding.
            let az = matrix_apply(&a, z).norm();
            assert!(
                az <= 1e-12 * norm * z.norm().max(1e-300),
                "|A z| = {az}, |A| = {norm}"
            );
        }
    }

    proptest! {
        #[test]
        fn quadratic_scaling_at_gamma_zero(
            zx in -2.0..2.0f64,
            zy in -2.0..2.0f64,
            c in 0.1..4.0f64,
        ) {
            prop_assume!(zx.abs() + zy.abs() > 1e-3);
            let z = Vec3::new(zx, zy, 0.0);
            let base = eval_kernel(z, 0.0, 1.0, 1.0, 2);
            let scaled = eval_kernel(z * c, 0.0, 1.0, 1.0, 2);
            for k in 0..2 {
                for l in 0..2 {
                    let want = c * c * base[k][l];
                    prop_assert!(
                        (scaled[k][l] - want).abs() <= 1e-13 * want.abs().max(1.0),
                        "entry ({k},{l}): {} vs {want}", scaled[k][l]
                    );
                }
            }
        }

        #[test]
        fn kernel_annihilates_z(
            zx in -5.0..5.0f64,
            zy in -5.0..5.0f64,
            zz in -5.0..5.0f64,
            gamma in -3.0..=1.0f64,
        ) {
            let z = Vec3::new(zx, zy, zz);
            let a = eval_kernel(z, gamma, 1.0, 1.0, 3);
            let az = matrix_apply(&a, z).norm();
            let norm = frobenius(&a);
            prop_assert!(az <= 1e-12 * norm * z.norm().max(1e-300));
        }
    }
}
