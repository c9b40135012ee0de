import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "happy-dom",
    include: ["tests/**/*.test.ts"],
    // The smoke test boots the real engine in a subprocess; allow for the
    // interpreter + index build startup cost.
    testTimeout: 30_000,
    hookTimeout: 60_000,
  },
});
