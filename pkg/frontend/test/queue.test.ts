import { describe, expect, it } from "vitest";

import { SerialQueue } from "../src/queue.js";

const tick = () => new Promise((resolve) => setTimeout(resolve, 0));

describe("SerialQueue", () => {
  it("runs tasks strictly one after another", async () => {
    const queue = new SerialQueue();
    const log: string[] = [];
    const slow = queue.run(async () => {
      log.push("slow start");
      await tick();
      await tick();
      log.push("slow end");
      return 1;
    });
    const fast = queue.run(async () => {
      log.push("fast");
      return 2;
    });
    expect(await slow).toBe(1);
    expect(await fast).toBe(2);
    expect(log).toEqual(["slow start", "slow end", "fast"]);
  });

  it("keeps going after a rejected task", async () => {
    const queue = new SerialQueue();
    const boom = queue.run(async () => {
      throw new Error("boom");
    });
    await expect(boom).rejects.toThrow("boom");
    await expect(queue.run(async () => "ok")).resolves.toBe("ok");
  });
});
