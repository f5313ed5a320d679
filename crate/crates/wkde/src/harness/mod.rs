//! Experiment harness (stub).
