/** Delay fn until `delayMs` after the last call; newer calls reset the timer. */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  delayMs: number,
): ((...args: A) => void) & { cancel(): void } {
  let timer: ReturnType<typeof setTimeout> | null = null;
  const wrapped = (...args: A) => {
    if (timer !== null) clearTimeout(timer);
    timer = setTimeout(() => {
      timer = null;
      fn(...args);
    }, delayMs);
  };
  wrapped.cancel = () => {
    if (timer !== null) {
      clearTimeout(timer);
      timer = null;
    }
  };
  return wrapped;
}

/** Hands out tokens; only the most recent one is current. Responses from
 * superseded requests are dropped by checking their token. */
export class LatestWins {
  private counter = 0;

  next(): number {
    return ++this.counter;
  }

  isCurrent(token: number): boolean {
    return token === this.counter;
  }
}
