import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    // the integration test boots the python session server and plays a
    // whole game over HTTP, so it needs more than the default 5s
    testTimeout: 120_000,
    hookTimeout: 60_000,
  },
});
