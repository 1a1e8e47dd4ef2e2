namespace ndb {
}  // namespace ndb
