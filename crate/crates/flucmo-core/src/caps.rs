/// Size limits for the exponential-time enumerations and recursions.
///
/// Exceeding a cap is always an error, never a silent truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Ground-set size for partitions and permutations.
    pub partitions: usize,
    /// Vertex count for disk non-crossing graphs.
    pub graphs: usize,
    /// `k + l` for the scalar second-order recursion.
    pub m2: usize,
    /// `k + l` for the good-graph multiset.
    pub good_graphs: usize,
    /// `k + l` for the matrix-valued second-order recursion and closed formulas.
    pub frak_m2: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            partitions: 10,
            graphs: 9,
            m2: 7,
            good_graphs: 6,
            frak_m2: 6,
        }
    }
}

impl Caps {
    pub(crate) fn check(what: &'static str, size: usize, cap: usize) -> crate::Result<()> {
        if size > cap {
            Err(crate::Error::CapExceeded { what, size, cap })
        } else {
            Ok(())
        }
    }
}
