//! Guide placeholder
