import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    // the integration test boots a real rating service
    testTimeout: 30_000,
    hookTimeout: 60_000,
  },
});
