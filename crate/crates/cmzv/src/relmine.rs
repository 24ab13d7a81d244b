//! Relation mining (placeholder).
