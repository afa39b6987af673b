//! Exterior algebra over a covector basis, exterior derivatives from
//! coordinates or structure equations, and change of basis to complex coframes.

mod basis;
mod coframe;
mod form;
mod frame;
pub mod linalg;

pub use basis::{Basis, Covector, Tag};
pub use coframe::Coframe;
pub use form::{Form, Word};
pub use frame::{Frame, FrameMode};
pub use linalg::Matrix;
