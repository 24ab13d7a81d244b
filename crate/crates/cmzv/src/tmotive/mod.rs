//! t-motivic side (placeholder).
