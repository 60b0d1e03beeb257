/* tslint:disable */
/* eslint-disable */

/**
 * Scenario knobs for [`simulate`]. Zero-length intervals are skipped.
 */
export class Scenario {
    free(): void;
    [Symbol.dispose](): void;
    constructor();
    burst_amplitude: number;
    burst_end_s: number;
    burst_start_s: number;
    dropout_end_s: number;
    dropout_start_s: number;
    duration_s: number;
    heart_rate: number;
    latency_ms: number;
    n_particles: number;
    seed: number;
}

/**
 * Signals, truth, emitted beats and a few trace columns of one run.
 */
export class Simulation {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    abp(): Float64Array;
    abp_peak(): Float64Array;
    /**
     * Filter beats, sample indices.
     */
    beats(): Uint32Array;
    ecg_artifact(): Float64Array;
    ecg(): Float64Array;
    latency(): Float64Array;
    true_hr(): Float64Array;
    /**
     * True beats, sample indices.
     */
    truth(): Uint32Array;
    readonly fs: number;
    readonly positive_predictivity: number;
    readonly sensitivity: number;
    readonly window_s: number;
}

export function peak_curve(true_hr: number, window_ms: number, n: number): Float64Array;

export function score_lists(reference: string, test: string, fs: number, tol_ms: number): Float64Array;

export function simulate(scenario: Scenario): Simulation;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_get_scenario_burst_amplitude: (a: number) => number;
    readonly __wbg_get_scenario_burst_end_s: (a: number) => number;
    readonly __wbg_get_scenario_burst_start_s: (a: number) => number;
    readonly __wbg_get_scenario_dropout_end_s: (a: number) => number;
    readonly __wbg_get_scenario_dropout_start_s: (a: number) => number;
    readonly __wbg_get_scenario_duration_s: (a: number) => number;
    readonly __wbg_get_scenario_heart_rate: (a: number) => number;
    readonly __wbg_get_scenario_latency_ms: (a: number) => number;
    readonly __wbg_get_scenario_n_particles: (a: number) => number;
    readonly __wbg_get_scenario_seed: (a: number) => number;
    readonly __wbg_scenario_free: (a: number, b: number) => void;
    readonly __wbg_set_scenario_burst_amplitude: (a: number, b: number) => void;
    readonly __wbg_set_scenario_burst_end_s: (a: number, b: number) => void;
    readonly __wbg_set_scenario_burst_start_s: (a: number, b: number) => void;
    readonly __wbg_set_scenario_dropout_end_s: (a: number, b: number) => void;
    readonly __wbg_set_scenario_dropout_start_s: (a: number, b: number) => void;
    readonly __wbg_set_scenario_duration_s: (a: number, b: number) => void;
    readonly __wbg_set_scenario_heart_rate: (a: number, b: number) => void;
    readonly __wbg_set_scenario_latency_ms: (a: number, b: number) => void;
    readonly __wbg_set_scenario_n_particles: (a: number, b: number) => void;
    readonly __wbg_set_scenario_seed: (a: number, b: number) => void;
    readonly __wbg_simulation_free: (a: number, b: number) => void;
    readonly peak_curve: (a: number, b: number, c: number) => [number, number, number, number];
    readonly scenario_new: () => number;
    readonly score_lists: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly simulate: (a: number) => [number, number, number];
    readonly simulation_abp: (a: number) => [number, number];
    readonly simulation_abp_peak: (a: number) => [number, number];
    readonly simulation_beats: (a: number) => [number, number];
    readonly simulation_ecg: (a: number) => [number, number];
    readonly simulation_ecg_artifact: (a: number) => [number, number];
    readonly simulation_fs: (a: number) => number;
    readonly simulation_latency: (a: number) => [number, number];
    readonly simulation_positive_predictivity: (a: number) => number;
    readonly simulation_sensitivity: (a: number) => number;
    readonly simulation_true_hr: (a: number) => [number, number];
    readonly simulation_truth: (a: number) => [number, number];
    readonly simulation_window_s: (a: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
