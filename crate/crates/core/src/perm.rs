//! Permutations of the five vertex labels of a pentachoron.
//!
//! A [`Perm5`] is stored as its lexicographic rank (0..120) among all image
//! sequences, so the identity has rank 0 and `43210` has rank 119. Composition,
//! inversion and sign are table lookups built at compile time.

use std::fmt;

/// Number of permutations of five elements.
pub const PERM5_COUNT: usize = 120;

const fn factorial(n: usize) -> usize {
    let mut r = 1;
    let mut i = 2;
    while i <= n {
        r *= i;
        i += 1;
    }
    r
}

const fn rank_of(images: [u8; 5]) -> u8 {
    let mut rank = 0usize;
    let mut i = 0;
    while i < 5 {
        let mut smaller = 0usize;
        let mut j = i + 1;
        while j < 5 {
            if images[j] < images[i] {
                smaller += 1;
            }
            j += 1;
        }
        rank += smaller * factorial(4 - i);
        i += 1;
    }
    rank as u8
}

const fn images_of(rank: usize) -> [u8; 5] {
    let mut used = [false; 5];
    let mut out = [0u8; 5];
    let mut rem = rank;
    let mut i = 0;
    while i < 5 {
        let f = factorial(4 - i);
        let mut k = rem / f;
        rem %= f;
        let mut v = 0;
        loop {
            if !used[v] {
                if k == 0 {
                    break;
                }
                k -= 1;
            }
            v += 1;
        }
        used[v] = true;
        out[i] = v as u8;
        i += 1;
    }
    out
}

const IMAGES: [[u8; 5]; PERM5_COUNT] = {
    let mut t = [[0u8; 5]; PERM5_COUNT];
    let mut r = 0;
    while r < PERM5_COUNT {
        t[r] = images_of(r);
        r += 1;
    }
    t
};

// COMPOSE[a][b] = a ∘ b, i.e. apply b first.
const COMPOSE: [[u8; PERM5_COUNT]; PERM5_COUNT] = {
    let mut t = [[0u8; PERM5_COUNT]; PERM5_COUNT];
    let mut a = 0;
    while a < PERM5_COUNT {
        let mut b = 0;
        while b < PERM5_COUNT {
            let mut img = [0u8; 5];
            let mut i = 0;
            while i < 5 {
                img[i] = IMAGES[a][IMAGES[b][i] as usize];
                i += 1;
            }
            t[a][b] = rank_of(img);
            b += 1;
        }
        a += 1;
    }
    t
};

const INVERSE: [u8; PERM5_COUNT] = {
    let mut t = [0u8; PERM5_COUNT];
    let mut a = 0;
    while a < PERM5_COUNT {
        let mut img = [0u8; 5];
        let mut i = 0;
        while i < 5 {
            img[IMAGES[a][i] as usize] = i as u8;
            i += 1;
        }
        t[a] = rank_of(img);
        a += 1;
    }
    t
};

const SIGN: [i8; PERM5_COUNT] = {
    let mut t = [0i8; PERM5_COUNT];
    let mut a = 0;
    while a < PERM5_COUNT {
        let mut inv = 0;
        let mut i = 0;
        while i < 5 {
            let mut j = i + 1;
            while j < 5 {
                if IMAGES[a][j] < IMAGES[a][i] {
                    inv += 1;
                }
                j += 1;
            }
            i += 1;
        }
        t[a] = if inv % 2 == 0 { 1 } else { -1 };
        a += 1;
    }
    t
};

/// A permutation of `{0,1,2,3,4}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Perm5(u8);

impl Perm5 {
    pub const IDENTITY: Perm5 = Perm5(0);

    pub const fn identity() -> Self {
        Perm5(0)
    }

    /// Builds a permutation from its image sequence, or `None` if the
    /// sequence is not a bijection of `{0,..,4}`.
    pub fn from_images(images: [u8; 5]) -> Option<Self> {
        let mut seen = [false; 5];
        for &v in &images {
            if v > 4 || seen[v as usize] {
                return None;
            }
            seen[v as usize] = true;
        }
        Some(Perm5(rank_of(images)))
    }

    pub fn from_rank(rank: usize) -> Option<Self> {
        (rank < PERM5_COUNT).then_some(Perm5(rank as u8))
    }

    /// Lexicographic rank of the image sequence.
    #[inline]
    pub fn rank(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn images(self) -> [u8; 5] {
        IMAGES[self.0 as usize]
    }

    /// Image of `i`.
    #[inline]
    pub fn apply(self, i: usize) -> usize {
        IMAGES[self.0 as usize][i] as usize
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    #[inline]
    pub fn compose(self, other: Perm5) -> Perm5 {
        Perm5(COMPOSE[self.0 as usize][other.0 as usize])
    }

    #[inline]
    pub fn inverse(self) -> Perm5 {
        Perm5(INVERSE[self.0 as usize])
    }

    /// `+1` for even permutations, `-1` for odd ones.
    #[inline]
    pub fn sign(self) -> i32 {
        SIGN[self.0 as usize] as i32
    }

    pub fn transposition(a: usize, b: usize) -> Perm5 {
        let mut img = [0u8, 1, 2, 3, 4];
        img.swap(a, b);
        Perm5(rank_of(img))
    }

    /// Image of a vertex bitmask.
    #[inline]
    pub fn apply_mask(self, mask: u8) -> u8 {
        let img = self.images();
        let mut out = 0u8;
        for (i, &v) in img.iter().enumerate() {
            if mask & (1 << i) != 0 {
                out |= 1 << v;
            }
        }
        out
    }

    /// All 120 permutations in rank order.
    pub fn all() -> impl Iterator<Item = Perm5> {
        (0..PERM5_COUNT as u8).map(Perm5)
    }
}

impl fmt::Debug for Perm5 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm5({self})")
    }
}

impl fmt::Display for Perm5 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in self.images() {
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
