/** Interval poller with overlap protection: a slow fetch never stacks a
 * second one behind it. */

export interface Poller {
  start(): void;
  stop(): void;
}

export function createPoller(tickFn: () => Promise<void>, intervalMs: number): Poller {
  let timer: ReturnType<typeof setInterval> | null = null;
  let running = false;

  async function tick(): Promise<void> {
    if (running) return;
    running = true;
    try {
      await tickFn();
    } finally {
      running = false;
    }
  }

  return {
    start() {
      if (timer !== null) return;
      void tick();
      timer = setInterval(() => void tick(), intervalMs);
    },
    stop() {
      if (timer !== null) {
        clearInterval(timer);
        timer = null;
      }
    },
  };
}
