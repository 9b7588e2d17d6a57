/// The D2Q9 velocity set.
///
/// ```text
///   6   2   5
///    \  |  /
///   3 - 0 - 1
///    /  |  \
///   7   4   8
/// ```
#[derive(Debug, Clone, Copy)]
pub struct D2Q9;

impl D2Q9 {
    pub const Q: usize = 9;

    pub const VELOCITIES: [[i32; 2]; 9] = [
        [0, 0],
        [1, 0],
        [0, 1],
        [-1, 0],
        [0, -1],
        [1, 1],
        [-1, 1],
        [-1, -1],
        [1, -1],
    ];

    /// Weights as exact fractions `(numerator, denominator)`.
    pub const WEIGHT_RATIOS: [(i64, i64); 9] = [
        (4, 9),
        (1, 9),
        (1, 9),
        (1, 9),
        (1, 9),
        (1, 36),
        (1, 36),
        (1, 36),
        (1, 36),
    ];

    pub const WEIGHTS: [f64; 9] = [
        4.0 / 9.0,
        1.0 / 9.0,
        1.0 / 9.0,
        1.0 / 9.0,
        1.0 / 9.0,
        1.0 / 36.0,
        1.0 / 36.0,
        1.0 / 36.0,
        1.0 / 36.0,
    ];

    /// Bounce-back partner of each direction.
    pub const OPPOSITE: [usize; 9] = [0, 3, 4, 1, 2, 7, 8, 5, 6];

    /// Squared lattice sound speed as a fraction.
    pub const SOUND_SPEED_SQ_RATIO: (i64, i64) = (1, 3);
    pub const SOUND_SPEED_SQ: f64 = 1.0 / 3.0;

    #[inline]
    pub fn velocity(v: usize) -> [f64; 2] {
        let e = Self::VELOCITIES[v];
        [e[0] as f64, e[1] as f64]
    }

    #[inline]
    pub fn dot(v: usize, u: [f64; 2]) -> f64 {
        let e = Self::VELOCITIES[v];
        e[0] as f64 * u[0] + e[1] as f64 * u[1]
    }
}
