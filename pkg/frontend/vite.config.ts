import { defineConfig } from "vitest/config";

// In dev mode /api proxies to the verification service; the production
// bundle is served by the service itself from frontend/dist.
export default defineConfig({
  server: {
    proxy: {
      "/api": process.env.SERVICE_URL ?? "http://127.0.0.1:8741",
    },
  },
  build: {
    outDir: "dist",
  },
  test: {
    environment: "happy-dom",
    include: ["tests/**/*.test.ts"],
    environmentOptions: {
      // the scripted e2e flow fetches the live service; make it same-origin
      happyDOM: { url: process.env.SERVICE_URL ?? "http://localhost:8741" },
    },
  },
});
