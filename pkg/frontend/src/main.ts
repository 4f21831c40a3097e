import { ApiClient } from "./api.js";
import { AnnotatorController } from "./render.js";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");

new AnnotatorController(root, new ApiClient(""), {
  onExported: (text) => {
    const blob = new Blob([text], { type: "text/plain;charset=utf-8" });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = "annotation.txt";
    link.click();
    URL.revokeObjectURL(link.href);
  },
});
