//! Exact computations around the q-Klyachko algebra `Kly_{n,q}`.
//!
//! * [`absorption`]: the random displacement process, exactly (boundary killed) and
//!   by Monte Carlo (on the integers).
//! * [`klyachko`]: the algebra in its squarefree basis and its degree map.
//! * [`kahler`]: Poincare duality, Hard Lefschetz, Hodge-Riemann and the volume
//!   polynomial.
//! * [`toric`]: the simplicial fan whose toric variety has cohomology `Kly_{n,q}`.
//! * [`matroidchow`]: the Chow ring of the projective geometry `PG(n,q)`.
//!
//! All arithmetic is exact over [`exactla::Rational`].

pub mod absorption;
pub mod error;
pub mod exactla;
pub mod exec;
pub mod kahler;
pub mod matroidchow;
pub mod klyachko;
pub mod qcore;
pub mod subset;
pub mod toric;

pub use error::{Error, Result};
pub use exactla::{Rational, RationalMatrix};
pub use exec::Exec;
pub use qcore::QContext;
pub use subset::Subset;
