//! C ABI surface (filled in later).
