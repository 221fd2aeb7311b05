// SPDX-License-Identifier: Apache-2.0

//! Criterion benchmarks for `flexevo`; see `benches/`.
