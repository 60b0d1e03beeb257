/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_get_scenario_burst_amplitude: (a: number) => number;
export const __wbg_get_scenario_burst_end_s: (a: number) => number;
export const __wbg_get_scenario_burst_start_s: (a: number) => number;
export const __wbg_get_scenario_dropout_end_s: (a: number) => number;
export const __wbg_get_scenario_dropout_start_s: (a: number) => number;
export const __wbg_get_scenario_duration_s: (a: number) => number;
export const __wbg_get_scenario_heart_rate: (a: number) => number;
export const __wbg_get_scenario_latency_ms: (a: number) => number;
export const __wbg_get_scenario_n_particles: (a: number) => number;
export const __wbg_get_scenario_seed: (a: number) => number;
export const __wbg_scenario_free: (a: number, b: number) => void;
export const __wbg_set_scenario_burst_amplitude: (a: number, b: number) => void;
export const __wbg_set_scenario_burst_end_s: (a: number, b: number) => void;
export const __wbg_set_scenario_burst_start_s: (a: number, b: number) => void;
export const __wbg_set_scenario_dropout_end_s: (a: number, b: number) => void;
export const __wbg_set_scenario_dropout_start_s: (a: number, b: number) => void;
export const __wbg_set_scenario_duration_s: (a: number, b: number) => void;
export const __wbg_set_scenario_heart_rate: (a: number, b: number) => void;
export const __wbg_set_scenario_latency_ms: (a: number, b: number) => void;
export const __wbg_set_scenario_n_particles: (a: number, b: number) => void;
export const __wbg_set_scenario_seed: (a: number, b: number) => void;
export const __wbg_simulation_free: (a: number, b: number) => void;
export const peak_curve: (a: number, b: number, c: number) => [number, number, number, number];
export const scenario_new: () => number;
export const score_lists: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const simulate: (a: number) => [number, number, number];
export const simulation_abp: (a: number) => [number, number];
export const simulation_abp_peak: (a: number) => [number, number];
export const simulation_beats: (a: number) => [number, number];
export const simulation_ecg: (a: number) => [number, number];
export const simulation_ecg_artifact: (a: number) => [number, number];
export const simulation_fs: (a: number) => number;
export const simulation_latency: (a: number) => [number, number];
export const simulation_positive_predictivity: (a: number) => number;
export const simulation_sensitivity: (a: number) => number;
export const simulation_true_hr: (a: number) => [number, number];
export const simulation_truth: (a: number) => [number, number];
export const simulation_window_s: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
