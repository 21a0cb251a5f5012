/** Optimistic mutation helper: apply locally, send, revert on failure. */

export interface OptimisticRun<T> {
  /** Apply the change to local state immediately; returns a revert snapshot. */
  apply: () => T;
  /** The actual service call. */
  remote: () => Promise<void>;
  /** Undo the local change when the service rejects it. */
  revert: (snapshot: T) => void;
  onError?: (error: unknown) => void;
}

export async function optimistic<T>(run: OptimisticRun<T>): Promise<boolean> {
  const snapshot = run.apply();
  try {
    await run.remote();
    return true;
  } catch (error) {
    run.revert(snapshot);
    run.onError?.(error);
    return false;
  }
}
